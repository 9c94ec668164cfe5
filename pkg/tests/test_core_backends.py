"""The compiled kernels and the pure-python fallback must agree with each other
and with the dense reference generator."""
import os
import subprocess
import sys

import numpy as np
import pytest

from holonome._core import BACKEND
from holonome._core import _fallback
from holonome.fock import standard_space
from holonome.lindblad import (
    NoiseParams,
    assemble_problem,
    master_rhs,
    standard_jump_ops,
)
from holonome.model import BlochAngles, build_full_hamiltonian, couplings_from_angles

try:
    from holonome._core import _kernels
except ImportError:  # pragma: no cover - compiled extension absent
    _kernels = None

SPACE = standard_space(mech_dim=4)
ANGLES = BlochAngles(1.1, 0.8)
PARAMS = couplings_from_angles(ANGLES, 3.0)
NOISE = NoiseParams(kappa1=0.21, kappa2=0.13, gamma_m=0.02, n_th=5.0)


def _random_density(seed, dim):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    return np.ascontiguousarray(rho)


def _apply(mod, problem, rho):
    out = np.empty_like(rho)
    mod.apply_rhs(rho, out, problem.local, problem.h_off, problem.h_w, problem.s_off, problem.s_fac)
    return out


def test_shifted_terms_densify_to_the_hamiltonian():
    problem = assemble_problem(PARAMS, NOISE, SPACE)
    dense = np.zeros((SPACE.dim, SPACE.dim), dtype=complex)
    for off, w in zip(problem.h_off, problem.h_w):
        cols = np.arange(SPACE.dim)
        rows = cols + off
        keep = (rows >= 0) & (rows < SPACE.dim)
        dense[rows[keep], cols[keep]] += w[keep]
    h = build_full_hamiltonian(PARAMS, SPACE).data
    np.testing.assert_allclose(dense, h - np.diag(np.diag(h)), atol=1e-14)


def test_fallback_matches_dense_generator():
    problem = assemble_problem(PARAMS, NOISE, SPACE)
    rho = _random_density(3, SPACE.dim)
    structured = _apply(_fallback, problem, rho)
    h = build_full_hamiltonian(PARAMS, SPACE)
    dense = master_rhs(rho, h, NOISE, standard_jump_ops(SPACE))
    np.testing.assert_allclose(structured, dense, atol=1e-13)


def test_active_backend_matches_dense_generator():
    from holonome import _core

    problem = assemble_problem(PARAMS, NOISE, SPACE)
    rho = _random_density(4, SPACE.dim)
    structured = _apply(_core, problem, rho)
    h = build_full_hamiltonian(PARAMS, SPACE)
    dense = master_rhs(rho, h, NOISE, standard_jump_ops(SPACE))
    np.testing.assert_allclose(structured, dense, atol=1e-13)


@pytest.mark.skipif(_kernels is None, reason="compiled kernels unavailable")
def test_compiled_and_fallback_rhs_agree():
    problem = assemble_problem(PARAMS, NOISE, SPACE)
    rho = _random_density(5, SPACE.dim)
    a = _apply(_kernels, problem, rho)
    b = _apply(_fallback, problem, rho)
    np.testing.assert_allclose(a, b, atol=1e-14, rtol=0.0)


@pytest.mark.skipif(_kernels is None, reason="compiled kernels unavailable")
def test_compiled_and_fallback_propagation_agree():
    problem = assemble_problem(PARAMS, NOISE, SPACE)
    dt, nsteps = 2e-3, 40
    results = []
    for mod in (_kernels, _fallback):
        rho = _random_density(6, SPACE.dim)
        mod.rk4_propagate(
            rho, dt, nsteps,
            problem.local, problem.h_off, problem.h_w, problem.s_off, problem.s_fac,
        )
        results.append(rho)
    np.testing.assert_allclose(results[0], results[1], atol=1e-13, rtol=0.0)


def test_propagation_preserves_trace_and_hermiticity():
    from holonome import _core

    problem = assemble_problem(PARAMS, NOISE, SPACE)
    rho = _random_density(7, SPACE.dim)
    _core.rk4_propagate(
        rho, 1e-3, 100,
        problem.local, problem.h_off, problem.h_w, problem.s_off, problem.s_fac,
    )
    assert abs(np.trace(rho).real - 1.0) < 1e-10
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-10


def test_backend_name_is_reported():
    assert BACKEND in ("cython", "python")


def test_env_var_forces_pure_python_backend():
    env = dict(os.environ, HOLONOME_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from holonome._core import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"

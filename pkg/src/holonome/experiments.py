"""Canonical numerical experiments on the holonomic gate set.

Three workflows:

* state transfer — a NOT loop moving a photon between the cavities,
* entanglement generation — a Hadamard loop preparing (|10> + |01>)/sqrt(2),
* damping sweeps — gate fidelity over a (kappa, gamma_m) grid with a hot
  mechanical bath.

Fidelity is always evaluated against the ideal gate output after tracing
out the mechanical mode: F = <psi| tr_m rho |psi>.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _core
from .errors import ValidationError
from .fock import (
    CAVITY_1,
    CAVITY_2,
    MECHANICAL,
    CompositeSpace,
    QState,
    basis_state,
    partial_trace,
    standard_space,
)
from .holonomy import GateSpec, catalog, gate_unitary, plan_pulse
from .lindblad import IntegratorConfig, NoiseParams, Trajectory, integrate
from .units import RATE_ANGULAR, coupling_from_mhz_over_2pi, rate_from_quoted_mhz

__all__ = [
    "ObservableSeries",
    "SweepGrid",
    "DEFAULT_G0",
    "KAPPA_RANGE_MHZ",
    "GAMMA_RANGE_MHZ",
    "populations",
    "fidelity",
    "ideal_target_state",
    "run_state_transfer",
    "run_entanglement",
    "run_sweep",
    "default_damping_grids",
]

#: Default collective coupling, quoted as G0/2pi = 2*sqrt(2) MHz.
DEFAULT_G0_MHZ_OVER_2PI = 2.0 * math.sqrt(2.0)
DEFAULT_G0 = coupling_from_mhz_over_2pi(DEFAULT_G0_MHZ_OVER_2PI)

#: Damping ranges as quoted (MHz) for the sweep defaults.
KAPPA_RANGE_MHZ = (0.031, 0.628)
GAMMA_RANGE_MHZ = (0.00188, 0.03581)

#: RK4 steps per pulse used by sweeps (accuracy ~1e-9, far below the
#: fidelity scale of interest).
SWEEP_STEPS = 250


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Time series of the three mode populations and the gate fidelity."""

    times: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    f: np.ndarray
    metadata: dict


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Gate fidelity F(kappa, gamma_m) on a damping grid.

    fidelities[i, j] belongs to kappa_values[i], gamma_values[j]; all rates
    are angular (rad/us) and the quoting convention used to build them is
    recorded.
    """

    kappa_values: np.ndarray
    gamma_values: np.ndarray
    fidelities: np.ndarray
    convention: str
    n_th: float
    metadata: dict


def _as_density(rho: Union[QState, np.ndarray], space: Optional[CompositeSpace]):
    if isinstance(rho, QState):
        return rho.to_density_matrix(), rho.space
    if space is None:
        raise ValidationError("a bare array needs an explicit space")
    return np.asarray(rho, dtype=np.complex128), space


def populations(
    rho: Union[QState, np.ndarray], space: Optional[CompositeSpace] = None
) -> tuple[float, float, float]:
    """Mean occupations (P1, P2, P3) = (cavity 1, cavity 2, mechanical)."""
    mat, space = _as_density(rho, space)
    occ = space.occupation_table
    diag = np.real(np.diag(mat))
    p1 = float(diag @ occ[:, space.position(CAVITY_1)])
    p2 = float(diag @ occ[:, space.position(CAVITY_2)])
    p3 = float(diag @ occ[:, space.position(MECHANICAL)])
    return p1, p2, p3


def fidelity(
    rho: Union[QState, np.ndarray],
    target: Union[QState, np.ndarray],
    space: Optional[CompositeSpace] = None,
) -> float:
    """Overlap <psi| tr_m rho |psi> with a pure two-cavity target."""
    mat, space = _as_density(rho, space)
    state = QState(space, mat, validate=False)
    reduced = partial_trace(state, (CAVITY_1, CAVITY_2))
    psi = target.data if isinstance(target, QState) else np.asarray(target, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] != reduced.space.dim:
        raise ValidationError(
            f"target must be a pure state of dim {reduced.space.dim}, got shape {psi.shape}"
        )
    return float(np.real(psi.conj() @ reduced.data @ psi))


def ideal_target_state(spec_or_name: Union[GateSpec, str], space: CompositeSpace) -> np.ndarray:
    """Two-cavity state the ideal gate produces from one photon in cavity 1.

    The qubit components (|10>, |01>) are the first column of the gate
    unitary; the vector is returned on the reduced cavity-1 x cavity-2
    space.
    """
    spec = catalog(spec_or_name) if isinstance(spec_or_name, str) else spec_or_name
    if isinstance(spec, tuple):
        raise ValidationError("composite gates have no single-loop target")
    u = gate_unitary(spec)
    dims = (space.dims[space.position(CAVITY_1)], space.dims[space.position(CAVITY_2)])
    reduced_dim = dims[0] * dims[1]
    psi = np.zeros(reduced_dim, dtype=np.complex128)
    psi[1 * dims[1] + 0] = u[0, 0]  # |10>
    psi[0 * dims[1] + 1] = u[1, 0]  # |01>
    return psi


def _series_from_trajectory(traj: Trajectory, space: CompositeSpace, target: np.ndarray, extra: dict) -> ObservableSeries:
    k = len(traj.times)
    p1 = np.empty(k)
    p2 = np.empty(k)
    p3 = np.empty(k)
    f = np.empty(k)
    for i in range(k):
        p1[i], p2[i], p3[i] = populations(traj.states[i], space)
        f[i] = fidelity(traj.states[i], target, space)
    metadata = dict(traj.metadata)
    metadata.update(extra)
    return ObservableSeries(times=traj.times, p1=p1, p2=p2, p3=p3, f=f, metadata=metadata)


def _run_gate_series(
    gate_name: str,
    noise: Optional[NoiseParams],
    config: Optional[IntegratorConfig],
    g0: float,
    space: Optional[CompositeSpace],
    n_samples: int,
) -> ObservableSeries:
    space = space if space is not None else standard_space()
    spec = catalog(gate_name)
    plan = plan_pulse(spec, g0)
    rho0 = basis_state(space, (1, 0, 0))
    traj = integrate(rho0, plan, noise, config, space, n_samples=n_samples)
    target = ideal_target_state(spec, space)
    return _series_from_trajectory(
        traj,
        space,
        target,
        {"gate": gate_name, "theta": spec.angles.theta, "phi": spec.angles.phi},
    )


def run_state_transfer(
    noise: Optional[NoiseParams] = None,
    config: Optional[IntegratorConfig] = None,
    *,
    g0: float = DEFAULT_G0,
    space: Optional[CompositeSpace] = None,
    n_samples: int = 201,
) -> ObservableSeries:
    """Photon transfer |100> -> |001> via one NOT loop.

    In the closed system the populations follow P1 = cos^4(alpha/2),
    P3 = sin^2(alpha)/2 (phonon bus, maximal at half the pulse) and
    P2 = sin^4(alpha/2), reaching unit transfer at alpha = pi.
    """
    return _run_gate_series("NOT", noise, config, g0, space, n_samples)


def run_entanglement(
    noise: Optional[NoiseParams] = None,
    config: Optional[IntegratorConfig] = None,
    *,
    g0: float = DEFAULT_G0,
    space: Optional[CompositeSpace] = None,
    n_samples: int = 201,
) -> ObservableSeries:
    """Cavity-cavity entanglement via one Hadamard loop from |100>."""
    return _run_gate_series("HADAMARD", noise, config, g0, space, n_samples)


def default_damping_grids(
    points: tuple[int, int] = (21, 21), convention: str = RATE_ANGULAR
) -> tuple[np.ndarray, np.ndarray]:
    """Log-spaced (kappa, gamma_m) grids over the standard quoted ranges."""
    nk, ng = int(points[0]), int(points[1])
    if nk < 2 or ng < 2:
        raise ValidationError("need at least 2 points per axis")
    kappa = np.geomspace(
        rate_from_quoted_mhz(KAPPA_RANGE_MHZ[0], convention),
        rate_from_quoted_mhz(KAPPA_RANGE_MHZ[1], convention),
        nk,
    )
    gamma = np.geomspace(
        rate_from_quoted_mhz(GAMMA_RANGE_MHZ[0], convention),
        rate_from_quoted_mhz(GAMMA_RANGE_MHZ[1], convention),
        ng,
    )
    return kappa, gamma


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("HOLONOME_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"HOLONOME_THREADS must be an integer, got {env!r}") from exc
    return max(1, os.cpu_count() or 1)


def run_sweep(
    gate: str = "NOT",
    kappa_values: Optional[np.ndarray] = None,
    gamma_values: Optional[np.ndarray] = None,
    n_th: float = 100.0,
    config: Optional[IntegratorConfig] = None,
    *,
    g0: float = DEFAULT_G0,
    convention: str = RATE_ANGULAR,
    space: Optional[CompositeSpace] = None,
    workers: Optional[int] = None,
) -> SweepGrid:
    """Gate fidelity over a damping grid, equal cavity rates kappa1 = kappa2.

    Each grid point integrates one full pulse from |100> and evaluates the
    fidelity against the ideal gate output.  Points are independent; the
    grid is filled in parallel with at most HOLONOME_THREADS workers (or
    the explicit `workers` argument), and the result does not depend on
    the worker count.
    """
    space = space if space is not None else standard_space()
    spec = catalog(gate)
    if isinstance(spec, tuple):
        raise ValidationError("sweeps are defined for single-loop gates")
    plan = plan_pulse(spec, g0)
    if kappa_values is None or gamma_values is None:
        kd, gd = default_damping_grids(convention=convention)
        kappa_values = kd if kappa_values is None else np.asarray(kappa_values, dtype=float)
        gamma_values = gd if gamma_values is None else np.asarray(gamma_values, dtype=float)
    else:
        kappa_values = np.asarray(kappa_values, dtype=float)
        gamma_values = np.asarray(gamma_values, dtype=float)
    if config is None:
        config = IntegratorConfig(dt=plan.duration_tau / SWEEP_STEPS)
    elif config.dt is None:
        config = dataclasses.replace(config, dt=plan.duration_tau / SWEEP_STEPS)

    rho0 = basis_state(space, (1, 0, 0))
    target = ideal_target_state(spec, space)

    def point(idx: tuple[int, int]) -> tuple[tuple[int, int], float, dict]:
        i, j = idx
        noise = NoiseParams(
            kappa1=float(kappa_values[i]),
            kappa2=float(kappa_values[i]),
            gamma_m=float(gamma_values[j]),
            n_th=n_th,
            convention=convention,
        )
        traj = integrate(rho0, plan, noise, config, space, n_samples=2)
        return idx, fidelity(traj.final_state, target, space), traj.metadata["invariants"]

    indices = [(i, j) for i in range(len(kappa_values)) for j in range(len(gamma_values))]
    fid = np.empty((len(kappa_values), len(gamma_values)))
    agg = {
        "max_trace_dev": 0.0,
        "max_hermiticity_dev": 0.0,
        "min_eigenvalue": float("inf"),
        "max_top_mech_population": 0.0,
    }

    nworkers = _worker_count(workers)
    if nworkers > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(point, indices))
    else:
        results = [point(idx) for idx in indices]

    for (i, j), value, inv in results:
        fid[i, j] = value
        agg["max_trace_dev"] = max(agg["max_trace_dev"], inv["max_trace_dev"])
        agg["max_hermiticity_dev"] = max(
            agg["max_hermiticity_dev"], inv["max_hermiticity_dev"]
        )
        agg["min_eigenvalue"] = min(agg["min_eigenvalue"], inv["min_eigenvalue"])
        agg["max_top_mech_population"] = max(
            agg["max_top_mech_population"], inv["max_top_mech_population"]
        )

    fid.setflags(write=False)
    metadata = {
        "gate": gate,
        "theta": spec.angles.theta,
        "phi": spec.angles.phi,
        "g0": float(g0),
        "tau_us": plan.duration_tau,
        "dt": config.dt,
        "space_dims": list(space.dims),
        "backend": _core.BACKEND,
        "workers": nworkers,
        "invariants": agg,
    }
    return SweepGrid(
        kappa_values=kappa_values,
        gamma_values=gamma_values,
        fidelities=fid,
        convention=convention,
        n_th=float(n_th),
        metadata=metadata,
    )

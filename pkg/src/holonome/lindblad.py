"""Open-system dynamics: thermal Lindblad master equation and its integrator.

The equation of motion is

    drho/dt = i [rho, H] + kappa1 L[a1] rho + kappa2 L[a2] rho
              + gamma_m { (n_th + 1) L[b] + n_th L[b+] } rho,

with L[o] rho = (2 o rho o+ - o+ o rho - rho o+ o) / 2.  Both cavities decay
to vacuum; the mechanical mode exchanges quanta with a bath of mean
occupation n_th.

Integration is fixed-step classical RK4.  Every operator here conserves or
shifts the excitation pattern along a single generalized diagonal, so the
right-hand side is evaluated in O(n^2) by the shifted-diagonal kernels in
holonome._core rather than by dense matrix products; `master_rhs` keeps the
textbook dense form as the cross-checked reference implementation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _core
from .errors import (
    NumericalError,
    StepSizeError,
    TruncationOverflowError,
    TruncationWarning,
    ValidationError,
)
from .fock import (
    CAVITY_1,
    CAVITY_2,
    MECHANICAL,
    CompositeSpace,
    Operator,
    QState,
    annihilation,
    embed,
)
from .holonomy import PulsePlan
from .model import BlochAngles, CouplingParams, eigensystem
from .units import RATE_ANGULAR, rate_from_quoted_mhz

__all__ = [
    "NoiseParams",
    "IntegratorConfig",
    "Trajectory",
    "lindblad_term",
    "thermal_term",
    "master_rhs",
    "standard_jump_ops",
    "assemble_problem",
    "integrate",
    "closed_propagator",
]

#: Stability bound: dt * max(G0, damping rates) must not exceed this.
STABILITY_BOUND = 0.05
#: Default number of RK4 steps per pulse when no dt is requested.
DEFAULT_STEPS = 2000
#: Hard abort threshold for the top mechanical Fock-level population.
TRUNCATION_ABORT = 1e-2

_TRACE_TOL = 1e-8
_HERM_TOL = 1e-9
_EIG_TOL = -1e-8


@dataclass(frozen=True)
class NoiseParams:
    """Damping rates (angular, rad/us) and mechanical bath occupation."""

    kappa1: float = 0.0
    kappa2: float = 0.0
    gamma_m: float = 0.0
    n_th: float = 0.0
    convention: str = RATE_ANGULAR

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "gamma_m", "n_th"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_quoted_mhz(
        cls,
        kappa1: float,
        kappa2: float,
        gamma_m: float,
        n_th: float = 0.0,
        convention: str = RATE_ANGULAR,
    ) -> "NoiseParams":
        """Build from rates as quoted in MHz under an explicit convention.

        "angular" takes the quoted numbers as angular rates (rad/us);
        "linear" multiplies them by 2*pi.
        """
        return cls(
            kappa1=rate_from_quoted_mhz(kappa1, convention),
            kappa2=rate_from_quoted_mhz(kappa2, convention),
            gamma_m=rate_from_quoted_mhz(gamma_m, convention),
            n_th=n_th,
            convention=convention,
        )

    @property
    def max_rate(self) -> float:
        return max(self.kappa1, self.kappa2, self.gamma_m * (self.n_th + 1.0))


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    dt is an upper bound on the step; the integrator shrinks it so that
    samples land exactly on step boundaries.  dt=None picks tau/2000.
    """

    dt: Optional[float] = None
    method: str = "rk4"
    hermitize_every: int = 50
    truncation_check_threshold: float = 1e-5

    def __post_init__(self):
        if self.dt is not None:
            dt = float(self.dt)
            if not (math.isfinite(dt) and dt > 0.0):
                raise ValidationError(f"dt must be positive, got {dt}")
            object.__setattr__(self, "dt", dt)
        if self.method != "rk4":
            raise ValidationError(f"unknown method {self.method!r}; only 'rk4'")
        if int(self.hermitize_every) < 1:
            raise ValidationError("hermitize_every must be >= 1")
        object.__setattr__(self, "hermitize_every", int(self.hermitize_every))
        thr = float(self.truncation_check_threshold)
        if not 0.0 < thr < 1.0:
            raise ValidationError("truncation_check_threshold must be in (0, 1)")
        object.__setattr__(self, "truncation_check_threshold", thr)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of the master equation.

    states has shape (len(times), n, n); metadata records the step size,
    backend, and the worst invariant deviations seen along the run.
    """

    times: np.ndarray
    states: np.ndarray
    metadata: dict

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 1 or np.any(np.diff(t) <= 0.0):
            raise ValidationError("times must be strictly increasing")
        object.__setattr__(self, "times", t)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _op_matrix(op: Union[Operator, np.ndarray]) -> np.ndarray:
    return op.data if isinstance(op, Operator) else np.asarray(op, dtype=np.complex128)


def lindblad_term(op: Union[Operator, np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Single-channel dissipator L[o] rho = (2 o rho o+ - o+ o rho - rho o+ o)/2."""
    o = _op_matrix(op)
    rho = np.asarray(rho, dtype=np.complex128)
    od = o.conj().T
    odo = od @ o
    return o @ rho @ od - 0.5 * (odo @ rho + rho @ odo)


def thermal_term(op: Union[Operator, np.ndarray], rho: np.ndarray, n_th: float) -> np.ndarray:
    """Thermal dissipator: (n_th + 1) L[o] + n_th L[o+], per unit rate.

    At n_th = 0 this reduces to plain decay; at vacuum the instantaneous
    heating rate of the mode occupation is n_th times the channel rate.
    """
    n_th = float(n_th)
    if n_th < 0.0:
        raise ValidationError(f"n_th must be >= 0, got {n_th}")
    o = _op_matrix(op)
    out = (n_th + 1.0) * lindblad_term(o, rho)
    if n_th > 0.0:
        out += n_th * lindblad_term(o.conj().T, rho)
    return out


def standard_jump_ops(space: CompositeSpace) -> tuple[Operator, Operator, Operator]:
    """The three jump operators (a1, a2, b) embedded in the full space."""
    dims = space.dims
    a1 = embed(annihilation(dims[space.position(CAVITY_1)]), CAVITY_1, space)
    a2 = embed(annihilation(dims[space.position(CAVITY_2)]), CAVITY_2, space)
    bm = embed(annihilation(dims[space.position(MECHANICAL)]), MECHANICAL, space)
    return a1, a2, bm


def master_rhs(
    rho: np.ndarray,
    h: Union[Operator, np.ndarray],
    noise: Optional[NoiseParams],
    ops: Sequence[Union[Operator, np.ndarray]],
) -> np.ndarray:
    """Dense reference evaluation of the master-equation right-hand side.

    ops must be the jump operators (a1, a2, b) on the same space as h.
    This form is quadratic in the dimension times a matrix product, so the
    integrator uses the structured kernels instead; tests pin both to each
    other.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    hm = _op_matrix(h)
    if hm.shape != rho.shape:
        raise ValidationError(f"H shape {hm.shape} does not match rho {rho.shape}")
    out = 1j * (rho @ hm - hm @ rho)
    if noise is None:
        return out
    a1, a2, bm = (_op_matrix(o) for o in ops)
    if noise.kappa1 > 0.0:
        out += noise.kappa1 * lindblad_term(a1, rho)
    if noise.kappa2 > 0.0:
        out += noise.kappa2 * lindblad_term(a2, rho)
    if noise.gamma_m > 0.0:
        out += noise.gamma_m * thermal_term(bm, rho, noise.n_th)
    return out


@dataclass(frozen=True, eq=False)
class ShiftedProblem:
    """Master equation in shifted-diagonal form, ready for the kernels."""

    n: int
    local: np.ndarray
    h_off: np.ndarray
    h_w: np.ndarray
    s_off: np.ndarray
    s_fac: np.ndarray
    top_mech_mask: np.ndarray


def _ladder_monomial(
    space: CompositeSpace,
    coeff: complex,
    lowers: Sequence = (),
    raises_: Sequence = (),
) -> tuple[int, np.ndarray]:
    """Shift-op encoding of coeff * prod(lowering) * prod(raising).

    Returns (offset, w) with the operator entries T[c + offset, c] = w[c];
    weights vanish where a raising operator would leave the truncated space.
    """
    occ = space.occupation_table
    dims = space.dims
    strides = space.strides
    w = np.full(space.dim, complex(coeff), dtype=np.complex128)
    offset = 0
    for mode in lowers:
        k = space.position(mode)
        w = w * np.sqrt(occ[:, k])
        offset -= strides[k]
    for mode in raises_:
        k = space.position(mode)
        w = w * np.sqrt(occ[:, k] + 1.0) * (occ[:, k] < dims[k] - 1)
        offset += strides[k]
    return offset, w


def assemble_problem(
    params: CouplingParams,
    noise: Optional[NoiseParams],
    space: CompositeSpace,
) -> ShiftedProblem:
    """Encode Hamiltonian and dissipators as shifted diagonals.

    The coupling monomials and the four jump channels each live on one
    generalized diagonal; anticommutator halves and detunings collapse into
    a single elementwise `local` matrix.
    """
    n = space.dim
    occ = space.occupation_table

    hterms: list[tuple[int, np.ndarray]] = []
    for g, mode in ((params.g1, CAVITY_1), (params.g2, CAVITY_2)):
        if g != 0:
            hterms.append(_ladder_monomial(space, g, lowers=[mode], raises_=[MECHANICAL]))
            hterms.append(
                _ladder_monomial(space, g.conjugate(), lowers=[MECHANICAL], raises_=[mode])
            )

    channels: list[tuple[float, int, np.ndarray]] = []
    if noise is not None:
        specs = [
            (noise.kappa1, [CAVITY_1], []),
            (noise.kappa2, [CAVITY_2], []),
            (noise.gamma_m * (noise.n_th + 1.0), [MECHANICAL], []),
            (noise.gamma_m * noise.n_th, [], [MECHANICAL]),
        ]
        for rate, lowers, raises_ in specs:
            if rate > 0.0:
                off, w = _ladder_monomial(space, 1.0, lowers=lowers, raises_=raises_)
                channels.append((float(rate), off, w))

    hdiag = params.delta1 * occ[:, space.position(CAVITY_1)] + params.delta2 * occ[
        :, space.position(CAVITY_2)
    ]
    local = 1j * (hdiag[None, :] - hdiag[:, None]) * np.ones((n, n))
    for rate, _, w in channels:
        nu = np.abs(w) ** 2
        local -= 0.5 * rate * (nu[:, None] + nu[None, :])

    if hterms:
        h_off = np.array([off for off, _ in hterms], dtype=np.int64)
        h_w = np.ascontiguousarray(np.stack([w for _, w in hterms]))
    else:
        h_off = np.zeros(0, dtype=np.int64)
        h_w = np.zeros((0, n), dtype=np.complex128)

    if channels:
        s_off = np.array([off for _, off, _ in channels], dtype=np.int64)
        s_fac = np.ascontiguousarray(
            np.stack([rate * np.outer(w, w.conj()) for rate, _, w in channels])
        )
    else:
        s_off = np.zeros(0, dtype=np.int64)
        s_fac = np.zeros((0, n, n), dtype=np.complex128)

    km = space.position(MECHANICAL)
    top_mask = occ[:, km] == space.dims[km] - 1

    return ShiftedProblem(
        n=n,
        local=np.ascontiguousarray(local, dtype=np.complex128),
        h_off=h_off,
        h_w=h_w,
        s_off=s_off,
        s_fac=s_fac,
        top_mech_mask=top_mask,
    )


def _check_step(dt: float, params: CouplingParams, noise: Optional[NoiseParams]):
    scale = params.g0
    scale = max(scale, abs(params.delta1), abs(params.delta2))
    if noise is not None:
        scale = max(scale, noise.max_rate)
    if dt * scale > STABILITY_BOUND * (1.0 + 1e-12):
        raise StepSizeError(
            f"dt = {dt:g} violates dt * max(G0, rates) <= {STABILITY_BOUND} "
            f"(max rate {scale:g} rad/us); reduce dt below {STABILITY_BOUND / scale:g}"
        )


def integrate(
    rho0: QState,
    plan: PulsePlan,
    noise: Optional[NoiseParams],
    config: Optional[IntegratorConfig],
    space: CompositeSpace,
    n_samples: int = 201,
) -> Trajectory:
    """Integrate one pulse of the master equation.

    Parameters
    ----------
    rho0 : QState
        Initial state on `space` (pure states are promoted).
    plan : PulsePlan
        Constant couplings and duration.
    noise : NoiseParams or None
        None means closed-system evolution.
    config : IntegratorConfig or None
        None takes the defaults (dt = tau/2000, hermitization every 50
        steps).
    n_samples : int
        Number of stored samples, including both endpoints.

    Returns
    -------
    Trajectory
        Sampled density matrices; metadata["invariants"] holds the worst
        trace/hermiticity/positivity deviations and the largest top
        mechanical level population seen at sample times.
    """
    if config is None:
        config = IntegratorConfig()
    n_samples = int(n_samples)
    if n_samples < 2:
        raise ValidationError("n_samples must be >= 2")
    if rho0.space != space:
        raise ValidationError("initial state lives on a different space")

    params = plan.couplings
    tau = plan.duration_tau
    dt_req = config.dt if config.dt is not None else tau / DEFAULT_STEPS
    _check_step(dt_req, params, noise)

    n_seg = n_samples - 1
    steps_per_seg = max(1, math.ceil(tau / (dt_req * n_seg) - 1e-12))
    n_steps = steps_per_seg * n_seg
    dt = tau / n_steps

    problem = assemble_problem(params, noise, space)
    rho = np.ascontiguousarray(rho0.to_density_matrix())

    times = np.linspace(0.0, tau, n_samples)
    states = np.empty((n_samples, problem.n, problem.n), dtype=np.complex128)
    kernel_args = (problem.local, problem.h_off, problem.h_w, problem.s_off, problem.s_fac)

    max_trace_dev = 0.0
    max_herm_dev = 0.0
    min_eig = float("inf")
    max_top = 0.0
    warned = False

    def record(idx: int):
        nonlocal max_trace_dev, max_herm_dev, min_eig, max_top, warned
        states[idx] = rho
        tr_dev = abs(float(np.trace(rho).real) - 1.0) + abs(float(np.trace(rho).imag))
        herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        top = float(np.real(np.sum(np.diag(rho)[problem.top_mech_mask])))
        max_trace_dev = max(max_trace_dev, tr_dev)
        max_herm_dev = max(max_herm_dev, herm_dev)
        min_eig = min(min_eig, lo)
        max_top = max(max_top, top)
        if tr_dev > _TRACE_TOL:
            raise NumericalError(f"trace deviation {tr_dev:g} at t = {times[idx]:g}")
        if herm_dev > _HERM_TOL:
            raise NumericalError(f"hermiticity deviation {herm_dev:g} at t = {times[idx]:g}")
        if lo < _EIG_TOL:
            raise NumericalError(f"negative eigenvalue {lo:g} at t = {times[idx]:g}")
        if top > TRUNCATION_ABORT:
            raise TruncationOverflowError(
                f"top mechanical level population {top:g} at t = {times[idx]:g}; "
                "increase the mechanical cutoff"
            )
        if top > config.truncation_check_threshold and not warned:
            warnings.warn(
                f"top mechanical level population reached {top:g}; "
                "results may be truncation-limited",
                TruncationWarning,
                stacklevel=3,
            )
            warned = True

    record(0)
    since_herm = 0
    for seg in range(1, n_samples):
        left = steps_per_seg
        while left > 0:
            chunk = min(left, config.hermitize_every - since_herm)
            _core.rk4_propagate(rho, dt, chunk, *kernel_args)
            left -= chunk
            since_herm += chunk
            if since_herm >= config.hermitize_every:
                np.add(rho, rho.conj().T, out=rho)
                rho *= 0.5
                since_herm = 0
        record(seg)

    states.setflags(write=False)
    metadata = {
        "backend": _core.BACKEND,
        "dt": dt,
        "n_steps": n_steps,
        "hermitize_every": config.hermitize_every,
        "pulse": {
            "g1": [params.g1.real, params.g1.imag],
            "g2": [params.g2.real, params.g2.imag],
            "g0": params.g0,
            "tau_us": tau,
            "pulse_area": plan.pulse_area,
        },
        "noise": None
        if noise is None
        else {
            "kappa1": noise.kappa1,
            "kappa2": noise.kappa2,
            "gamma_m": noise.gamma_m,
            "n_th": noise.n_th,
            "convention": noise.convention,
        },
        "space_dims": list(space.dims),
        "invariants": {
            "max_trace_dev": max_trace_dev,
            "max_hermiticity_dev": max_herm_dev,
            "min_eigenvalue": min_eig,
            "max_top_mech_population": max_top,
        },
    }
    return Trajectory(times=times, states=states, metadata=metadata)


def closed_propagator(angles: BlochAngles, g0: float, t: float) -> np.ndarray:
    """Analytic closed-system propagator on the single-excitation subspace.

    In the (|100>, |010>, |001>) basis, at pulse area alpha = G0 t:
    the dark state is stationary and the bright/intermediate pair rotates,

        U1 = |d><d| + cos(alpha) (|b><b| + |e><e|)
             - i sin(alpha) (|b><e| + |e><b|).

    This is the independent oracle the RK4 integrator is tested against.
    """
    es = eigensystem(angles, g0)
    alpha = float(g0) * float(t)
    d, b = es.dark, es.bright
    e_vec = np.array([0.0, 1.0, 0.0], dtype=np.complex128)
    proj_d = np.outer(d, d.conj())
    proj_be = np.outer(b, b.conj()) + np.outer(e_vec, e_vec.conj())
    swap = np.outer(b, e_vec.conj()) + np.outer(e_vec, b.conj())
    return proj_d + math.cos(alpha) * proj_be - 1j * math.sin(alpha) * swap

"""Physical model: two driven cavities beam-splitter-coupled to one mechanical mode.

In the interaction picture, after linearizing the optomechanical coupling
and driving both cavities on their red sidebands, the system Hamiltonian is

    H = delta1 * n1 + delta2 * n2 + (G1 a1 b+ + G2 a2 b+ + h.c.),

with a1, a2 the cavity annihilation operators, b the mechanical one, and
G1, G2 the effective (generally complex) coupling strengths.  On resonance
(delta = 0) the total excitation number is conserved and the dynamics in
the single-excitation subspace span{|100>, |010>, |001>} is a 3x3 problem.

Writing G1 = G0 sin(theta/2) e^{i phi} and G2 = -G0 cos(theta/2) maps a
point (theta, phi) on the Bloch sphere to a coupling pair; the qubit is
encoded in the two cavity single-photon states.  The dark state of the 3x3
Hamiltonian decouples from the dynamics and the orthogonal bright state
Rabi-oscillates with the intermediate state at frequency G0 — these two
vectors are what the holonomic gate construction transports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .fock import CAVITY_1, CAVITY_2, MECHANICAL, CompositeSpace, Operator, annihilation, creation, embed

__all__ = [
    "BlochAngles",
    "CouplingParams",
    "Eigensystem",
    "couplings_from_angles",
    "angles_from_couplings",
    "subspace_hamiltonian",
    "build_full_hamiltonian",
    "eigensystem",
]

#: Flat-basis order of the single-excitation subspace: (|100>, |010>, |001>).
SINGLE_EXCITATION_LABELS = ("g1", "e", "g2")


@dataclass(frozen=True)
class BlochAngles:
    """Gate target on the Bloch sphere: polar theta in [0, pi], azimuth phi in [0, 2pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ValidationError("angles must be finite")
        if not 0.0 <= theta <= math.pi:
            raise ValidationError(f"theta {theta} outside [0, pi]")
        if not 0.0 <= phi < 2.0 * math.pi:
            raise ValidationError(f"phi {phi} outside [0, 2*pi)")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def wrapped(cls, theta: float, phi: float) -> "BlochAngles":
        """Construct with phi reduced mod 2*pi."""
        return cls(theta, float(phi) % (2.0 * math.pi))

    def canonical(self) -> "BlochAngles":
        """Fix the gauge: at the poles (theta = 0 or pi) phi is meaningless, use 0."""
        if self.theta in (0.0, math.pi):
            return BlochAngles(self.theta, 0.0)
        return self


@dataclass(frozen=True)
class CouplingParams:
    """Cavity-mechanics couplings and cavity detunings, all in rad/us."""

    g1: complex
    g2: complex
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        g1 = complex(self.g1)
        g2 = complex(self.g2)
        d1 = float(self.delta1)
        d2 = float(self.delta2)
        for name, v in (("g1", g1), ("g2", g2)):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValidationError(f"{name} must be finite, got {v}")
        if not (math.isfinite(d1) and math.isfinite(d2)):
            raise ValidationError("detunings must be finite")
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "g2", g2)
        object.__setattr__(self, "delta1", d1)
        object.__setattr__(self, "delta2", d2)

    @property
    def g0(self) -> float:
        """Collective coupling sqrt(|G1|^2 + |G2|^2), the Rabi frequency."""
        return math.hypot(abs(self.g1), abs(self.g2))


def couplings_from_angles(angles: BlochAngles, g0: float) -> CouplingParams:
    """Coupling pair realizing a Bloch target: G1 = G0 sin(theta/2) e^{i phi}, G2 = -G0 cos(theta/2)."""
    g0 = float(g0)
    if not (math.isfinite(g0) and g0 > 0.0):
        raise ValidationError(f"g0 must be positive and finite, got {g0}")
    half = 0.5 * angles.theta
    g1 = g0 * math.sin(half) * complex(math.cos(angles.phi), math.sin(angles.phi))
    g2 = complex(-g0 * math.cos(half))
    return CouplingParams(g1=g1, g2=g2)


def angles_from_couplings(params: CouplingParams, tol: float = 1e-9) -> BlochAngles:
    """Invert :func:`couplings_from_angles`.

    Requires G2 real and non-positive (the gauge in which the angle map is
    defined).  At the poles the azimuth is canonicalized to 0.
    """
    g0 = params.g0
    if g0 <= 0.0:
        raise ValidationError("cannot recover angles from zero couplings")
    if abs(params.g2.imag) > tol * g0 or params.g2.real > tol * g0:
        raise ValidationError(
            f"g2 = {params.g2} is not real and non-positive; not in the angle gauge"
        )
    theta = 2.0 * math.atan2(abs(params.g1), -params.g2.real)
    phi = math.atan2(params.g1.imag, params.g1.real) % (2.0 * math.pi)
    return BlochAngles(theta, phi).canonical()


def subspace_hamiltonian(angles: BlochAngles, g0: float) -> np.ndarray:
    """3x3 Hamiltonian in the single-excitation basis (|100>, |010>, |001>).

    Only the intermediate phonon state |010> couples, with amplitudes
    G0 sin(theta/2) e^{+i phi} to |100> and -G0 cos(theta/2) to |001>.
    """
    g0 = float(g0)
    if not (math.isfinite(g0) and g0 > 0.0):
        raise ValidationError(f"g0 must be positive and finite, got {g0}")
    s = math.sin(0.5 * angles.theta)
    c = math.cos(0.5 * angles.theta)
    ph = complex(math.cos(angles.phi), math.sin(angles.phi))
    h = np.array(
        [
            [0.0, s * ph.conjugate(), 0.0],
            [s * ph, 0.0, -c],
            [0.0, -c, 0.0],
        ],
        dtype=np.complex128,
    )
    return g0 * h


def build_full_hamiltonian(params: CouplingParams, space: CompositeSpace) -> Operator:
    """Assemble the full-space Hamiltonian from couplings and detunings.

    The space must contain the three standard modes (cavity 1, mechanical,
    cavity 2).  Excitation number is conserved term by term: each coupling
    moves one quantum between a cavity and the mechanical mode.
    """
    dims = space.dims
    d1 = dims[space.position(CAVITY_1)]
    dm = dims[space.position(MECHANICAL)]
    d2 = dims[space.position(CAVITY_2)]

    a1 = embed(annihilation(d1), CAVITY_1, space)
    a2 = embed(annihilation(d2), CAVITY_2, space)
    bdag = embed(creation(dm), MECHANICAL, space)

    h = params.g1 * (a1 @ bdag) + params.g2 * (a2 @ bdag)
    h = h + h.dag()
    if params.delta1 != 0.0 or params.delta2 != 0.0:
        n1 = embed(annihilation(d1).dag() @ annihilation(d1), CAVITY_1, space)
        n2 = embed(annihilation(d2).dag() @ annihilation(d2), CAVITY_2, space)
        h = h + params.delta1 * n1 + params.delta2 * n2
    return h


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Spectral data of the single-excitation Hamiltonian.

    ``vectors`` holds the normalized eigenvectors (dark, upper, lower) as
    columns of the basis (|100>, |010>, |001>); energies are (0, +G0, -G0).
    The dark vector has no |010> component and is annihilated by the
    Hamiltonian; the bright vector is the orthogonal in-plane combination
    that couples to |010> with full strength G0.
    """

    energies: tuple[float, float, float]
    vectors: tuple[np.ndarray, np.ndarray, np.ndarray]
    dark: np.ndarray
    bright: np.ndarray


def _dark_bright(angles: BlochAngles) -> tuple[np.ndarray, np.ndarray]:
    s = math.sin(0.5 * angles.theta)
    c = math.cos(0.5 * angles.theta)
    ph = complex(math.cos(angles.phi), math.sin(angles.phi))
    dark = np.array([c, 0.0, s * ph], dtype=np.complex128)
    bright = np.array([s * ph.conjugate(), 0.0, -c], dtype=np.complex128)
    return dark, bright


def eigensystem(angles: BlochAngles, g0: float) -> Eigensystem:
    """Analytic eigensystem of :func:`subspace_hamiltonian`.

    The spectrum is (0, +G0, -G0); the zero mode is the dark state and the
    +/- modes are (|b> +/- |e>)/sqrt(2) with |e> = |010> and |b> the bright
    state.
    """
    g0 = float(g0)
    if not (math.isfinite(g0) and g0 > 0.0):
        raise ValidationError(f"g0 must be positive and finite, got {g0}")
    dark, bright = _dark_bright(angles)
    e_vec = np.array([0.0, 1.0, 0.0], dtype=np.complex128)
    upper = (bright + e_vec) / math.sqrt(2.0)
    lower = (bright - e_vec) / math.sqrt(2.0)
    for v in (dark, upper, lower):
        v.setflags(write=False)
    return Eigensystem(
        energies=(0.0, g0, -g0),
        vectors=(dark, upper, lower),
        dark=dark,
        bright=bright,
    )

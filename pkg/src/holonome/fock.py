"""Truncated multimode Fock-space algebra.

Dense operators on a tensor product of truncated bosonic modes.  The mode
order is fixed once by the :class:`CompositeSpace` and every flat matrix
index maps to an occupation tuple through row-major strides, so
``basis_state(space, (1, 0, 0))`` is unambiguous.

The standard space for this package holds the two optical cavities and the
mechanical oscillator in the order (cavity 1, mechanical, cavity 2); the
single-excitation basis is then ``|g1> = |100>``, ``|e> = |010>``,
``|g2> = |001>``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ValidationError

__all__ = [
    "ModeId",
    "CompositeSpace",
    "Operator",
    "QState",
    "CAVITY_1",
    "MECHANICAL",
    "CAVITY_2",
    "standard_space",
    "annihilation",
    "creation",
    "number",
    "identity",
    "embed",
    "basis_state",
    "partial_trace",
]

#: Tolerances used when validating states.
NORM_TOL = 1e-10
TRACE_TOL = 1e-8
HERM_TOL = 1e-9
POSITIVITY_TOL = -1e-8


@dataclass(frozen=True)
class ModeId:
    """Identity of one bosonic mode: a position index and a human label."""

    index: int
    label: str = ""


CAVITY_1 = ModeId(0, "cavity1")
MECHANICAL = ModeId(1, "mechanical")
CAVITY_2 = ModeId(2, "cavity2")

ModeLike = Union[ModeId, int]


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of truncated bosonic modes.

    Parameters
    ----------
    modes : tuple of (ModeId, int)
        Modes in tensor order with their truncation dimensions.  Every
        dimension must be at least 2 and mode indices must be unique.
    """

    modes: tuple[tuple[ModeId, int], ...]

    def __post_init__(self):
        modes = tuple((m, int(d)) for m, d in self.modes)
        object.__setattr__(self, "modes", modes)
        if not modes:
            raise ValidationError("a composite space needs at least one mode")
        indices = [m.index for m, _ in modes]
        if len(set(indices)) != len(indices):
            raise ValidationError(f"duplicate mode indices in {indices}")
        for m, d in modes:
            if d < 2:
                raise ValidationError(f"mode {m.label or m.index}: dimension {d} < 2")

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.modes)

    @property
    def dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @cached_property
    def strides(self) -> tuple[int, ...]:
        """Row-major strides: flat index = sum_k n_k * strides[k]."""
        out = []
        acc = 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    def position(self, mode: ModeLike) -> int:
        """Tensor position of a mode, addressed by ModeId or bare index."""
        for k, (m, _) in enumerate(self.modes):
            if m == mode or m.index == mode:
                return k
        raise ValidationError(f"mode {mode!r} is not part of this space")

    def flat_index(self, occupations: Sequence[int]) -> int:
        """Flat matrix index of an occupation tuple."""
        occs = tuple(int(n) for n in occupations)
        if len(occs) != self.n_modes:
            raise ValidationError(
                f"expected {self.n_modes} occupation numbers, got {len(occs)}"
            )
        for n, d, (m, _) in zip(occs, self.dims, self.modes):
            if not 0 <= n < d:
                raise ValidationError(
                    f"occupation {n} out of range [0, {d}) for mode {m.label or m.index}"
                )
        return sum(n * s for n, s in zip(occs, self.strides))

    def occupations(self, flat: int) -> tuple[int, ...]:
        """Occupation tuple for a flat matrix index (inverse of flat_index)."""
        flat = int(flat)
        if not 0 <= flat < self.dim:
            raise ValidationError(f"flat index {flat} out of range [0, {self.dim})")
        out = []
        for s in self.strides:
            out.append(flat // s)
            flat %= s
        return tuple(out)

    @cached_property
    def occupation_table(self) -> np.ndarray:
        """Integer array of shape (dim, n_modes): row f = occupations(f)."""
        grids = np.indices(self.dims).reshape(self.n_modes, -1).T
        grids.setflags(write=False)
        return grids


def standard_space(mech_dim: int = 15, cavity_dim: int = 2) -> CompositeSpace:
    """The (cavity 1, mechanical, cavity 2) space used throughout."""
    return CompositeSpace(
        ((CAVITY_1, cavity_dim), (MECHANICAL, mech_dim), (CAVITY_2, cavity_dim))
    )


def _frozen_complex(data: np.ndarray) -> np.ndarray:
    arr = np.array(data, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator tagged with the space it acts on.

    The matrix is stored read-only; algebraic operations return new
    operators on the same space.
    """

    space: CompositeSpace
    data: np.ndarray

    def __post_init__(self):
        arr = _frozen_complex(self.data)
        if arr.shape != (self.space.dim, self.space.dim):
            raise ValidationError(
                f"operator shape {arr.shape} does not match space dim {self.space.dim}"
            )
        object.__setattr__(self, "data", arr)

    def _coerce(self, other: "Operator") -> np.ndarray:
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.space != self.space:
            raise ValidationError("operators live on different spaces")
        return other.data

    def dag(self) -> "Operator":
        return Operator(self.space, self.data.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.space, self.data @ self._coerce(other))

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.space, self.data + self._coerce(other))

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(self.space, self.data - self._coerce(other))

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.data * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.data)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T)) <= tol)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        eye = np.eye(self.space.dim)
        return bool(np.max(np.abs(self.data @ self.data.conj().T - eye)) <= tol)


@dataclass(frozen=True, eq=False)
class QState:
    """Pure state (vector) or density matrix on a composite space.

    Construction validates the usual sanity invariants: unit norm for
    vectors; unit trace, hermiticity, and positivity (eigenvalues above
    ``-1e-8``) for density matrices.
    """

    space: CompositeSpace
    data: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        arr = _frozen_complex(self.data)
        n = self.space.dim
        if arr.shape not in ((n,), (n, n)):
            raise ValidationError(
                f"state shape {arr.shape} does not match space dim {n}"
            )
        object.__setattr__(self, "data", arr)
        if self.validate:
            self._check()

    def _check(self):
        if self.is_pure:
            norm = float(np.linalg.norm(self.data))
            if abs(norm - 1.0) > NORM_TOL:
                raise ValidationError(f"state norm {norm} deviates from 1")
        else:
            tr = complex(np.trace(self.data))
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValidationError(f"density-matrix trace {tr} deviates from 1")
            herm = float(np.max(np.abs(self.data - self.data.conj().T)))
            if herm > HERM_TOL:
                raise ValidationError(f"density matrix not Hermitian (dev {herm:g})")
            lo = float(np.linalg.eigvalsh(self.data)[0])
            if lo < POSITIVITY_TOL:
                raise ValidationError(f"density matrix not positive (min eig {lo:g})")

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def to_density_matrix(self) -> np.ndarray:
        """Density matrix as a plain array (|psi><psi| for pure states)."""
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)


def annihilation(dim: int) -> Operator:
    """Single-mode annihilation operator, a[n-1, n] = sqrt(n).

    The top Fock level has no level above it, so a * adag differs from
    adag * a + 1 in the last diagonal entry; that boundary defect is the
    price of truncation and is monitored during open-system runs.
    """
    dim = int(dim)
    if dim < 2:
        raise ValidationError(f"mode dimension {dim} < 2")
    mat = np.zeros((dim, dim), dtype=np.complex128)
    ns = np.arange(1, dim)
    mat[ns - 1, ns] = np.sqrt(ns)
    return Operator(CompositeSpace(((ModeId(0, "mode"), dim),)), mat)


def creation(dim: int) -> Operator:
    """Single-mode creation operator, the adjoint of :func:`annihilation`."""
    return annihilation(dim).dag()


def number(dim: int) -> Operator:
    """Single-mode number operator diag(0, 1, ..., dim-1)."""
    a = annihilation(dim)
    return a.dag() @ a


def identity(space: CompositeSpace) -> Operator:
    """Identity operator on a composite space."""
    return Operator(space, np.eye(space.dim))


def embed(op: Operator, mode: ModeLike, space: CompositeSpace) -> Operator:
    """Lift a single-mode operator to the full space: 1 x ... x op x ... x 1.

    Parameters
    ----------
    op : Operator
        A single-mode operator whose dimension matches the target mode's
        truncation.
    mode : ModeId or int
        Which tensor slot receives the operator.
    space : CompositeSpace
        The target space.
    """
    pos = space.position(mode)
    dims = space.dims
    if op.space.n_modes != 1:
        raise ValidationError("embed expects a single-mode operator")
    if op.space.dim != dims[pos]:
        raise ValidationError(
            f"operator dim {op.space.dim} does not match mode dim {dims[pos]}"
        )
    mat = np.array(1.0, dtype=np.complex128)
    for k, d in enumerate(dims):
        factor = op.data if k == pos else np.eye(d)
        mat = np.kron(mat, factor)
    return Operator(space, mat)


def basis_state(space: CompositeSpace, occupations: Sequence[int]) -> QState:
    """Pure Fock basis state |n_0, n_1, ...> on a composite space."""
    vec = np.zeros(space.dim, dtype=np.complex128)
    vec[space.flat_index(occupations)] = 1.0
    return QState(space, vec)


def partial_trace(state: QState, keep: Iterable[ModeLike]) -> QState:
    """Trace out every mode not listed in ``keep``.

    The kept modes retain their original relative order.  Returns a
    density-matrix state on the reduced space (positivity is inherited, so
    revalidation is skipped).
    """
    keep_pos = sorted({state.space.position(m) for m in keep})
    if not keep_pos:
        raise ValidationError("partial_trace must keep at least one mode")
    dims = state.space.dims
    rho = state.to_density_matrix().reshape(dims + dims)

    nm = state.space.n_modes
    letters = iter(string.ascii_lowercase)
    rows = [next(letters) for _ in range(nm)]
    cols = [rows[k] if k not in keep_pos else next(letters) for k in range(nm)]
    target = "".join(rows[k] for k in keep_pos) + "".join(cols[k] for k in keep_pos)
    reduced = np.einsum("".join(rows + cols) + "->" + target, rho)

    sub = CompositeSpace(tuple(state.space.modes[k] for k in keep_pos))
    reduced = reduced.reshape(sub.dim, sub.dim)
    return QState(sub, reduced, validate=False)

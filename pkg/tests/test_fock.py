import numpy as np
import pytest

from holonome.errors import ValidationError
from holonome.fock import (
    CAVITY_1,
    CAVITY_2,
    MECHANICAL,
    CompositeSpace,
    ModeId,
    Operator,
    QState,
    annihilation,
    basis_state,
    creation,
    embed,
    identity,
    number,
    partial_trace,
    standard_space,
)


# ---------------------------------------------------------------- ladder operators

def test_annihilation_dim2():
    a = annihilation(2)
    np.testing.assert_array_equal(a.data, [[0.0, 1.0], [0.0, 0.0]])


def test_annihilation_dim3_sqrt_weights():
    a = annihilation(3)
    expected = np.array([[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]], dtype=complex)
    np.testing.assert_allclose(a.data, expected, atol=1e-15)


def test_creation_is_adjoint():
    np.testing.assert_array_equal(creation(5).data, annihilation(5).data.conj().T)


@pytest.mark.parametrize("dim", [2, 3, 6])
def test_number_operator_diagonal(dim):
    n = number(dim)
    np.testing.assert_allclose(n.data, np.diag(np.arange(dim, dtype=float)), atol=1e-15)


def test_commutator_truncation_boundary():
    # [a, a+] = 1 except in the top level, where truncation bites
    dim = 6
    a, ad = annihilation(dim), creation(dim)
    comm = (a @ ad - ad @ a).data
    expected = np.eye(dim)
    expected[-1, -1] = 1.0 - dim
    np.testing.assert_allclose(comm, expected, atol=1e-12)


@pytest.mark.parametrize("dim", [0, 1, -3])
def test_ladder_rejects_tiny_dimension(dim):
    with pytest.raises(ValidationError):
        annihilation(dim)


# ---------------------------------------------------------------- composite space

def test_standard_space_layout():
    space = standard_space(mech_dim=15, cavity_dim=2)
    assert space.dims == (2, 15, 2)
    assert space.dim == 60
    assert space.strides == (30, 2, 1)
    # single-excitation basis: photon in cavity 1, phonon, photon in cavity 2
    assert space.flat_index((1, 0, 0)) == 30
    assert space.flat_index((0, 1, 0)) == 2
    assert space.flat_index((0, 0, 1)) == 1


def test_flat_index_round_trip():
    space = CompositeSpace(((ModeId(0, "x"), 2), (ModeId(1, "y"), 3), (ModeId(2, "z"), 4)))
    for flat in range(space.dim):
        assert space.flat_index(space.occupations(flat)) == flat


def test_occupation_table_matches_round_trip():
    space = standard_space(mech_dim=4)
    table = space.occupation_table
    for flat in range(space.dim):
        assert tuple(table[flat]) == space.occupations(flat)


def test_flat_index_errors():
    space = standard_space(mech_dim=3)
    with pytest.raises(ValidationError):
        space.flat_index((1, 0))
    with pytest.raises(ValidationError):
        space.flat_index((0, 3, 0))
    with pytest.raises(ValidationError):
        space.occupations(space.dim)


def test_space_rejects_duplicate_modes_and_small_dims():
    with pytest.raises(ValidationError):
        CompositeSpace(((ModeId(0), 2), (ModeId(0), 3)))
    with pytest.raises(ValidationError):
        CompositeSpace(((ModeId(0), 1),))
    with pytest.raises(ValidationError):
        CompositeSpace(())


def test_position_lookup():
    space = standard_space()
    assert space.position(MECHANICAL) == 1
    assert space.position(2) == 2
    with pytest.raises(ValidationError):
        space.position(ModeId(9, "nope"))


# ---------------------------------------------------------------- embedding

def test_embed_number_counts_each_mode():
    space = standard_space(mech_dim=3)
    n_ops = {
        CAVITY_1: embed(number(2), CAVITY_1, space),
        MECHANICAL: embed(number(3), MECHANICAL, space),
        CAVITY_2: embed(number(2), CAVITY_2, space),
    }
    state = basis_state(space, (1, 2, 0))
    vec = state.data
    assert np.real(vec.conj() @ n_ops[CAVITY_1].data @ vec) == pytest.approx(1.0)
    assert np.real(vec.conj() @ n_ops[MECHANICAL].data @ vec) == pytest.approx(2.0)
    assert np.real(vec.conj() @ n_ops[CAVITY_2].data @ vec) == pytest.approx(0.0)


def test_embed_different_modes_commute():
    space = standard_space(mech_dim=4)
    a1 = embed(annihilation(2), CAVITY_1, space)
    bd = embed(creation(4), MECHANICAL, space)
    comm = a1 @ bd - bd @ a1
    assert np.max(np.abs(comm.data)) < 1e-14


def test_embed_is_homomorphism_on_one_mode():
    space = standard_space(mech_dim=5)
    a = annihilation(5)
    ad = creation(5)
    left = embed(a @ ad, MECHANICAL, space)
    right = embed(a, MECHANICAL, space) @ embed(ad, MECHANICAL, space)
    np.testing.assert_allclose(left.data, right.data, atol=1e-14)


def test_embed_rejects_mismatched_dimension_and_unknown_mode():
    space = standard_space(mech_dim=4)
    with pytest.raises(ValidationError):
        embed(annihilation(3), CAVITY_1, space)
    with pytest.raises(ValidationError):
        embed(annihilation(4), ModeId(7, "ghost"), space)


# ---------------------------------------------------------------- operators and states

def test_operator_algebra_and_checks():
    space = standard_space(mech_dim=3)
    n = embed(number(3), MECHANICAL, space)
    assert n.is_hermitian()
    assert identity(space).is_unitary()
    assert not n.is_unitary()
    two_n = 2.0 * n
    np.testing.assert_allclose(two_n.data, 2.0 * n.data)
    assert (n - n).trace() == pytest.approx(0.0)


def test_operator_space_mismatch_rejected():
    a = embed(annihilation(2), CAVITY_1, standard_space(mech_dim=3))
    b = embed(annihilation(2), CAVITY_1, standard_space(mech_dim=4))
    with pytest.raises(ValidationError):
        _ = a @ b


def test_operator_data_is_read_only():
    a = annihilation(4)
    with pytest.raises(ValueError):
        a.data[0, 0] = 1.0


def test_basis_state_and_overflow():
    space = standard_space(mech_dim=3)
    state = basis_state(space, (0, 2, 1))
    assert state.is_pure
    assert state.data[space.flat_index((0, 2, 1))] == 1.0
    with pytest.raises(ValidationError):
        basis_state(space, (0, 3, 0))


def test_qstate_validation():
    space = standard_space(mech_dim=3)
    vec = np.zeros(space.dim)
    vec[0] = 0.9
    with pytest.raises(ValidationError):
        QState(space, vec)
    rho = np.eye(space.dim) / space.dim
    QState(space, rho)  # maximally mixed is fine
    with pytest.raises(ValidationError):
        QState(space, 2.0 * rho)  # wrong trace
    bad = np.zeros((space.dim, space.dim), dtype=complex)
    bad[0, 0] = 1.5
    bad[1, 1] = -0.5
    with pytest.raises(ValidationError):
        QState(space, bad)  # negative eigenvalue


def test_to_density_matrix_of_pure_state():
    space = standard_space(mech_dim=3)
    state = basis_state(space, (1, 0, 0))
    rho = state.to_density_matrix()
    assert rho.shape == (space.dim, space.dim)
    idx = space.flat_index((1, 0, 0))
    assert rho[idx, idx] == 1.0
    assert np.trace(rho) == pytest.approx(1.0)


# ---------------------------------------------------------------- partial trace

def test_partial_trace_product_state():
    space = standard_space(mech_dim=3)
    state = basis_state(space, (1, 2, 0))
    reduced = partial_trace(state, (CAVITY_1,))
    np.testing.assert_allclose(reduced.data, [[0, 0], [0, 1]], atol=1e-15)


def test_partial_trace_keeps_original_mode_order():
    space = standard_space(mech_dim=3)
    state = basis_state(space, (1, 0, 0))
    reduced = partial_trace(state, (CAVITY_2, CAVITY_1))  # order of keep is irrelevant
    assert tuple(m for m, _ in reduced.space.modes) == (CAVITY_1, CAVITY_2)
    assert np.real(reduced.data[reduced.space.flat_index((1, 0)), reduced.space.flat_index((1, 0))]) == pytest.approx(1.0)


def test_partial_trace_entangled_cavities():
    space = standard_space(mech_dim=3)
    vec = np.zeros(space.dim, dtype=complex)
    vec[space.flat_index((1, 0, 0))] = 1 / np.sqrt(2)
    vec[space.flat_index((0, 0, 1))] = 1 / np.sqrt(2)
    state = QState(space, vec)
    both = partial_trace(state, (CAVITY_1, CAVITY_2))
    # mechanical mode is in vacuum, so the cavity pair stays pure
    i10 = both.space.flat_index((1, 0))
    i01 = both.space.flat_index((0, 1))
    assert np.real(both.data[i10, i10]) == pytest.approx(0.5)
    assert np.real(both.data[i10, i01]) == pytest.approx(0.5)
    one = partial_trace(state, (CAVITY_1,))
    np.testing.assert_allclose(one.data, np.eye(2) / 2, atol=1e-14)


def test_partial_trace_preserves_trace_on_random_density():
    rng = np.random.default_rng(11)
    space = standard_space(mech_dim=3)
    x = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(size=(space.dim, space.dim))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    state = QState(space, rho)
    for keep in ((CAVITY_1,), (MECHANICAL,), (CAVITY_1, CAVITY_2)):
        reduced = partial_trace(state, keep)
        assert np.trace(reduced.data).real == pytest.approx(1.0, abs=1e-12)


def test_partial_trace_requires_modes():
    state = basis_state(standard_space(mech_dim=3), (0, 0, 0))
    with pytest.raises(ValidationError):
        partial_trace(state, ())

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpcsim.coupling import (
    Coupling,
    CouplingKind,
    CouplingMatrix,
    build_matrix,
    invariant_subspaces,
    phase_from_angle,
    reachable_basis,
)
from cpcsim.errors import InconsistentBasis, InvalidArgument

from oracles import dense_hamiltonian

ABC = ("a", "b", "c")


def test_basis_of_100():
    assert reachable_basis([(1, 0, 0)], Coupling.nondegenerate(), ABC) == [(1, 0, 0), (0, 1, 1)]


@pytest.mark.parametrize("n", range(0, 9))
def test_n00_subspace_dimension(n):
    assert len(reachable_basis([(n, 0, 0)], Coupling.nondegenerate(), ABC)) == n + 1


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_general_subspace_dimension(na, nb, nc):
    basis = reachable_basis([(na, nb, nc)], Coupling.nondegenerate(), ABC)
    assert len(basis) == na + min(nb, nc) + 1
    # conserved quantities along the orbit
    for occ in basis:
        assert occ[0] + occ[1] == na + nb
        assert occ[0] + occ[2] == na + nc


def test_200_matrix_and_spectrum():
    m = build_matrix(Coupling.nondegenerate(), reachable_basis([(2, 0, 0)], Coupling.nondegenerate(), ABC), ABC)
    assert m.basis == ((2, 0, 0), (1, 1, 1), (0, 2, 2))
    expected = np.array([[0, math.sqrt(2), 0], [math.sqrt(2), 0, 2], [0, 2, 0]])
    np.testing.assert_allclose(m.entries, expected, atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(m.entries), [-math.sqrt(6), 0, math.sqrt(6)], atol=1e-14)


@pytest.mark.parametrize(
    "coupling,seed",
    [
        (Coupling.nondegenerate(), (3, 1, 0)),
        (Coupling.nondegenerate(phase=1j), (2, 1, 2)),
        (Coupling.degenerate(), (3, 1)),
        (Coupling.converter(phase=phase_from_angle(0.3)), (2, 1)),
    ],
)
def test_matrix_matches_dense_ladder_operators(coupling, seed):
    modes = coupling.modes
    basis = reachable_basis([seed], coupling, modes)
    m = build_matrix(coupling, basis, modes)
    cutoff = max(max(b) for b in basis)
    dense = dense_hamiltonian(coupling.kind.value, cutoff, coupling.strength_phase)
    dim = cutoff + 1
    idx = [np.ravel_multi_index(b, (dim,) * len(modes)) for b in basis]
    np.testing.assert_allclose(m.entries, dense[np.ix_(idx, idx)], atol=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.floats(0, 2 * math.pi))
def test_matrix_is_hermitian(na, nb, nc, phi):
    c = Coupling.nondegenerate(phase=phase_from_angle(phi))
    m = build_matrix(c, reachable_basis([(na, nb, nc)], c, ABC), ABC).entries
    np.testing.assert_allclose(m, m.conj().T, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_b_c_exchange_symmetry(na, nb, nc):
    c = Coupling.nondegenerate()
    m1 = build_matrix(c, reachable_basis([(na, nb, nc)], c, ABC), ABC)
    m2 = build_matrix(c, reachable_basis([(na, nc, nb)], c, ABC), ABC)
    np.testing.assert_allclose(m1.entries, m2.entries, atol=1e-15)


def test_degenerate_and_converter_conservation():
    deg = reachable_basis([(3, 1)], Coupling.degenerate(), ("a", "b"))
    assert {2 * a + b for a, b in deg} == {7}
    conv = reachable_basis([(3, 1)], Coupling.converter(), ("a", "c"))
    assert {a + c for a, c in conv} == {4}
    assert len(conv) == 5


def test_spectator_modes_are_untouched():
    c = Coupling.nondegenerate("a", "b", "c")
    modes = ("a", "b", "c", "d")
    for occ in reachable_basis([(2, 0, 0, 3)], c, modes):
        assert occ[3] == 3


def test_invariant_subspaces_partition():
    c = Coupling.nondegenerate()
    blocks = invariant_subspaces([(1, 0, 0), (0, 1, 1), (2, 0, 0), (0, 0, 1)], c, ABC)
    assert sorted(len(b) for b in blocks) == [1, 2, 3]


def test_unclosed_basis_raises():
    with pytest.raises(InconsistentBasis):
        build_matrix(Coupling.nondegenerate(), [(1, 0, 0)], ABC)
    with pytest.raises(InconsistentBasis):
        build_matrix(Coupling.nondegenerate(), [(1, 0, 0), (0, 1, 1), (1, 0, 0)], ABC)


@pytest.mark.parametrize(
    "args",
    [
        dict(kind="nondegenerate", modes=("a", "b")),
        dict(kind="nondegenerate", modes=("a", "a", "c")),
        dict(kind="degenerate", modes=("a", "b"), strength_phase=2.0),
    ],
)
def test_invalid_couplings(args):
    with pytest.raises(InvalidArgument):
        Coupling(**args)


def test_unknown_kind():
    with pytest.raises(ValueError):
        Coupling("quartic", ("a",))


def test_coupling_mode_missing_from_registry():
    with pytest.raises(InvalidArgument):
        reachable_basis([(1, 0)], Coupling.nondegenerate(), ("a", "b"))


def test_matrix_json_round_trip():
    c = Coupling.nondegenerate(phase=1j)
    m = build_matrix(c, reachable_basis([(3, 0, 1)], c, ABC), ABC)
    back = CouplingMatrix.from_dict(m.to_dict())
    assert back.basis == m.basis and back.modes == m.modes
    np.testing.assert_array_equal(back.entries, m.entries)


def test_coupling_to_dict():
    assert Coupling.converter("x", "y").to_dict() == {"type": "converter", "a": "x", "c": "y", "phase": [1.0, 0.0]}
    assert CouplingKind("degenerate") is CouplingKind.DEGENERATE

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpcsim.coupling import Coupling, phase_from_angle
from cpcsim.errors import InvalidArgument
from cpcsim.evolution import (
    evolve,
    fix_eigenvector_signs,
    population_trace,
    propagator,
    return_amplitude,
    return_probability,
    return_spectrum,
)
from cpcsim.fock import QuantumState, fidelity, make_coherent, make_fock, marginal_distribution, mean_number

from conftest import MODES, random_states
from oracles import dense_evolve

thetas = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)


def test_single_photon_closed_form():
    for th in np.linspace(0, 2 * math.pi, 37):
        out = evolve(make_fock({"a": 1, "b": 0, "c": 0}), Coupling.nondegenerate(), th).state
        assert out.amplitude((1, 0, 0)) == pytest.approx(math.cos(th), abs=1e-14)
        assert out.amplitude((0, 1, 1)) == pytest.approx(-1j * math.sin(th), abs=1e-14)


def test_phase_rotates_pair_amplitude():
    g = phase_from_angle(0.7)
    out = evolve(make_fock({"a": 1, "b": 0, "c": 0}), Coupling.nondegenerate(phase=g), 0.4).state
    assert out.amplitude((0, 1, 1)) == pytest.approx(-1j * g * math.sin(0.4), abs=1e-15)


def test_two_photon_closed_form():
    # eigenvalues 0, +-sqrt6; |200> overlaps 2/3 with the null vector and 1/6 with each other
    for th in np.linspace(0, 3, 25):
        expected = 2 / 3 + 1 / 3 * math.cos(math.sqrt(6) * th)
        assert return_amplitude(2, th) == pytest.approx(expected, abs=1e-14)
    assert return_probability(2, 2 * math.pi / math.sqrt(6)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("kind", ["nondegenerate", "degenerate", "converter"])
def test_matches_scipy_expm(kind):
    rng = np.random.default_rng(11)
    nmodes = 3 if kind == "nondegenerate" else 2
    modes = MODES[:nmodes]
    coupling = Coupling(kind, modes, phase_from_angle(rng.uniform(0, 6.3)))
    for _ in range(10):
        amps = {tuple(int(x) for x in rng.integers(0, 3, nmodes)): complex(*rng.normal(size=2)) for _ in range(3)}
        state = QuantumState.from_amplitudes(modes, amps)
        th = rng.uniform(-5, 5)
        ours = evolve(state, coupling, th).state
        cutoff = 9  # larger than any reachable occupation here
        ref = dense_evolve(kind, dict(state.amplitudes), th, cutoff, coupling.strength_phase)
        for occ in set(ref) | set(ours.amplitudes):
            assert ours.amplitude(occ) == pytest.approx(ref.get(occ, 0), abs=1e-11)


@settings(max_examples=1000, deadline=None)
@given(random_states(), thetas)
def test_unitarity(state, theta):
    out = evolve(state, Coupling.nondegenerate(), theta).state
    assert out.norm() == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=1000, deadline=None)
@given(random_states(), thetas, thetas)
def test_group_law(state, t1, t2):
    c = Coupling.nondegenerate()
    two = evolve(evolve(state, c, t1).state, c, t2).state
    one = evolve(state, c, t1 + t2).state
    for occ in set(two.amplitudes) | set(one.amplitudes):
        assert two.amplitude(occ) == pytest.approx(one.amplitude(occ), abs=1e-9)


@settings(max_examples=1000, deadline=None)
@given(random_states(), thetas)
def test_conserved_quantities(state, theta):
    out = evolve(state, Coupling.nondegenerate(), theta).state

    def moments(s):
        na, nb, nc = (mean_number(s, m) for m in MODES)
        return na + nb, na + nc

    np.testing.assert_allclose(moments(out), moments(state), atol=1e-9)
    for occ in out.amplitudes:
        assert any(
            occ[0] + occ[1] == o[0] + o[1] and occ[0] + occ[2] == o[0] + o[2] for o in state.amplitudes
        )


@settings(max_examples=300, deadline=None)
@given(random_states(), thetas)
def test_inverse(state, theta):
    c = Coupling.nondegenerate()
    back = evolve(evolve(state, c, theta).state, c, -theta).state
    assert fidelity(back, state) == pytest.approx(1.0, abs=1e-10)


def test_zero_theta_is_identity():
    s = make_coherent(0.8, "a", modes=MODES)
    out = evolve(s, Coupling.nondegenerate(), 0.0).state
    for occ, amp in s.amplitudes.items():
        assert out.amplitude(occ) == pytest.approx(amp, abs=1e-15)


def test_evolve_adds_missing_modes():
    out = evolve(make_fock({"a": 1}), Coupling.nondegenerate(), math.pi / 2).state
    assert out.modes == ("a", "b", "c")
    assert abs(out.amplitude((0, 1, 1))) == pytest.approx(1.0, abs=1e-15)


def test_evolve_rejects_nonfinite():
    with pytest.raises(InvalidArgument):
        evolve(make_fock({"a": 1}), Coupling.nondegenerate(), math.inf)


def test_norm_weight_and_discard_carried():
    s = QuantumState(MODES, {(1, 0, 0): 1.0}, norm_weight=0.25, discarded_mass=1e-13)
    out = evolve(s, Coupling.nondegenerate(), 1.0).state
    assert (out.norm_weight, out.discarded_mass) == (0.25, 1e-13)


def test_propagator_unitary_and_cached_spectrum():
    from cpcsim.coupling import reachable_basis

    c = Coupling.nondegenerate()
    basis = reachable_basis([(5, 0, 0)], c, MODES)
    u = propagator(c, basis, MODES, 1.234)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(6), atol=1e-13)
    assert return_spectrum(5) is return_spectrum(5)


def test_eigenvector_sign_convention():
    v = fix_eigenvector_signs(np.array([[0.6, -0.8j], [-0.8, 0.6j]]))
    for j in range(2):
        k = np.argmax(np.abs(v[:, j]))
        assert v[k, j].imag == 0 and v[k, j].real > 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_return_amplitude_matches_evolution(n):
    for th in (0.3, 2.2, 7.9):
        out = evolve(make_fock({"a": n, "b": 0, "c": 0}), Coupling.nondegenerate(), th).state
        assert return_amplitude(n, th) == pytest.approx(out.amplitude((n, 0, 0)), abs=1e-12)


def test_return_probability_array_shape():
    th = np.linspace(0, 1, 12).reshape(3, 4)
    assert return_probability(3, th).shape == (3, 4)
    assert isinstance(return_probability(3, 0.5), float)


def test_population_trace():
    thetas, pop = population_trace(1, math.pi, 5)
    np.testing.assert_allclose(pop, np.cos(thetas) ** 2, atol=1e-15)
    with pytest.raises(InvalidArgument):
        population_trace(1, 1.0, 1)


def test_coherent_input_is_not_periodic():
    # Fock components revive at incommensurate angles, so a coherent state never fully returns
    s = make_coherent(math.sqrt(1.5), "a", modes=MODES)
    c = Coupling.nondegenerate()
    best = max(fidelity(evolve(s, c, t).state, s) for t in np.linspace(0.5, 30, 400))
    assert best < 0.99
    one = evolve(make_fock({"a": 1, "b": 0, "c": 0}), c, math.pi).state
    assert fidelity(one, make_fock({"a": 1, "b": 0, "c": 0})) == pytest.approx(1.0, abs=1e-14)


def test_filtering_purifies_single_photon():
    s = evolve(make_coherent(1.0, "a", modes=MODES), Coupling.nondegenerate(), math.pi).state
    before = marginal_distribution(make_coherent(1.0, "a", modes=MODES), "a")
    from cpcsim.fock import project

    after = marginal_distribution(project(s, {"b": 0, "c": 0}), "a")
    assert after[1] / (1 - after[0]) > before[1] / (1 - before[0])

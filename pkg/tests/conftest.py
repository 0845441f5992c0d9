import math

import numpy as np
import pytest
from hypothesis import strategies as st

from cpcsim import _kernels
from cpcsim.fock import QuantumState

MODES = ("a", "b", "c")


@pytest.fixture(params=["python", "cython"])
def kernels(request):
    if request.param == "cython":
        if _kernels.compiled_backend is None:
            pytest.skip("compiled kernels not built")
        return _kernels.compiled_backend
    return _kernels.python_backend


occupations = st.tuples(*[st.integers(0, 4)] * 3)
amplitudes = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z) > 1e-3
)


@st.composite
def random_states(draw, max_terms=5):
    support = draw(st.lists(occupations, min_size=1, max_size=max_terms, unique=True))
    amps = {occ: draw(amplitudes) for occ in support}
    return QuantumState.from_amplitudes(MODES, amps)


def random_state(rng, max_n=4, terms=4, modes=MODES):
    amps = {}
    for _ in range(terms):
        occ = tuple(int(x) for x in rng.integers(0, max_n + 1, len(modes)))
        amps[occ] = complex(rng.normal(), rng.normal())
    return QuantumState.from_amplitudes(modes, amps)


def poisson_pmf(mean, n):
    """Poisson pmf straight from the formula, independent of scipy."""
    return math.exp(-mean) * mean**n / math.factorial(n)

"""Exact unitary evolution exp(-i theta M) on invariant subspaces.

Each connected block of the coupling graph is diagonalized once (cached on the
role-mode occupations, so spectator modes do not fragment the cache) and the
propagator is rebuilt from the spectrum for any angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .coupling import Coupling, invariant_subspaces, local_matrix, role_index
from .errors import CPCError, InvalidArgument
from .fock import QuantumState


@dataclass(frozen=True)
class EvolutionResult:
    state: QuantumState
    theta: float
    subspace_dims: tuple[int, ...]


def fix_eigenvector_signs(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    vecs = np.array(vecs, dtype=complex)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        k = int(np.argmax(np.abs(col).round(12)))
        vecs[:, j] = col * (abs(col[k]) / col[k])
    return vecs


@lru_cache(maxsize=4096)
def _eigensystem(coupling: Coupling, local_basis: tuple[tuple[int, ...], ...]):
    mat = local_matrix(coupling, local_basis)
    try:
        vals, vecs = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise CPCError(f"eigendecomposition failed for matrix\n{mat}") from exc
    vecs = fix_eigenvector_signs(vecs)
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


def eigensystem(coupling: Coupling, basis, modes) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and sign-fixed eigenvectors of the coupling on ``basis``."""
    index = role_index(coupling, modes)
    local = tuple(tuple(occ[i] for i in index) for occ in basis)
    return _eigensystem(coupling, local)


def propagator(coupling: Coupling, basis, modes, theta: float) -> np.ndarray:
    vals, vecs = eigensystem(coupling, basis, modes)
    return (vecs * np.exp(-1j * theta * vals)) @ vecs.conj().T


def evolve(state: QuantumState, coupling: Coupling, theta: float) -> EvolutionResult:
    """Apply exp(-i theta M) to ``state``.

    Coupling modes missing from the state's registry are added as vacuum.
    """
    if not math.isfinite(theta):
        raise InvalidArgument(f"theta must be finite, got {theta}")
    state = state.with_modes(coupling.modes)
    blocks = invariant_subspaces(state.amplitudes.keys(), coupling, state.modes)
    out: dict = {}
    for block in blocks:
        psi = state.vector(block)
        if len(block) == 1:
            out[block[0]] = psi[0]
            continue
        phi = propagator(coupling, block, state.modes, theta) @ psi
        out.update(zip(block, phi))
    return EvolutionResult(state._replace(out), float(theta), tuple(len(b) for b in blocks))


@lru_cache(maxsize=256)
def return_spectrum(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and overlap weights |<n00|k>|^2 for the |n00> subspace."""
    if n < 0:
        raise InvalidArgument("photon number must be nonnegative")
    coupling = Coupling.nondegenerate()
    local = tuple((n - j, j, j) for j in range(n + 1))
    vals, vecs = _eigensystem(coupling, local)
    weights = np.abs(vecs[0]) ** 2
    weights.setflags(write=False)
    return vals, weights


def return_amplitude(n: int, theta):
    """<n00| U(theta) |n00> for scalar or array ``theta``."""
    vals, weights = return_spectrum(n)
    th = np.asarray(theta, dtype=float)
    re, im = _kernels.spectral_sum(weights, vals, th.ravel())
    amp = (re + 1j * im).reshape(th.shape)
    return complex(amp) if amp.ndim == 0 else amp


def return_probability(n: int, theta):
    vals, weights = return_spectrum(n)
    th = np.asarray(theta, dtype=float)
    p = _kernels.return_probability(weights, vals, th.ravel()).reshape(th.shape)
    return float(p) if p.ndim == 0 else p


def population_trace(n: int, theta_max: float, samples: int) -> tuple[np.ndarray, np.ndarray]:
    """|<n00|U(theta)|n00>|^2 on a uniform grid from 0 to ``theta_max`` inclusive."""
    if samples < 2:
        raise InvalidArgument("population_trace needs at least 2 samples")
    thetas = np.linspace(0.0, theta_max, samples)
    return thetas, return_probability(n, thetas)

"""Numpy implementations of the hot kernels.

These are the reference semantics; ``_ckernels.pyx`` must agree bit-for-bit
on the cascade counts and to rounding on the spectral sums.
"""
import numpy as np


def spectral_sum(weights, eigvals, thetas):
    """Real and imaginary parts of sum_k w_k exp(-i lambda_k theta) on a theta grid."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    eigvals = np.ascontiguousarray(eigvals, dtype=np.float64)
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    re = np.zeros_like(thetas)
    im = np.zeros_like(thetas)
    for w, lam in zip(weights, eigvals):
        phase = lam * thetas
        re += w * np.cos(phase)
        im -= w * np.sin(phase)
    return re, im


def return_probability(weights, eigvals, thetas):
    re, im = spectral_sum(weights, eigvals, thetas)
    return re * re + im * im


def cascade_trials(uniforms, depth, k, p_click, dark, eta_dbl, residual, photon_prob):
    """Count k-fold coincidences over trials described by rows of ``uniforms``.

    Row layout for n = 2**depth leaves: column 0 decides photon presence,
    columns 1..n-1 the doubler outcomes (heap order), n..2n-1 the leaf
    detectors, 2n..3n-2 the residual detectors (only read when ``residual``).
    Returns (signal, noise): coincidences with and without a photon.
    """
    u = np.asarray(uniforms, dtype=np.float64)
    n = 1 << depth
    present = u[:, 0] < photon_prob
    reach = np.zeros((u.shape[0], 2 * n), dtype=bool)
    reach[:, 1] = present
    success = u[:, 1:n] < eta_dbl  # node i -> column i-1
    clicks = np.zeros(u.shape[0], dtype=np.int64)
    for node in range(1, n):
        ok = reach[:, node] & success[:, node - 1]
        reach[:, 2 * node] = ok
        reach[:, 2 * node + 1] = ok
        if residual:
            failed = reach[:, node] & ~success[:, node - 1]
            ur = u[:, 2 * n + node - 1]
            clicks += np.where(failed, ur < p_click, ur < dark)
    leaf_u = u[:, n : 2 * n]
    leaf_reach = reach[:, n : 2 * n]
    clicks += np.where(leaf_reach, leaf_u < p_click, leaf_u < dark).sum(axis=1)
    fired = clicks >= k
    return int(np.count_nonzero(fired & present)), int(np.count_nonzero(fired & ~present))

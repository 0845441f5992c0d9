# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def spectral_sum(weights, eigvals, thetas):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] lam = np.ascontiguousarray(eigvals, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t nt = th.shape[0], nk = w.shape[0], i, j
    re_arr = np.zeros(nt, dtype=np.float64)
    im_arr = np.zeros(nt, dtype=np.float64)
    cdef double[::1] re = re_arr
    cdef double[::1] im = im_arr
    cdef double sr, si, phase
    with nogil:
        for i in range(nt):
            sr = 0.0
            si = 0.0
            for j in range(nk):
                phase = lam[j] * th[i]
                sr += w[j] * cos(phase)
                si -= w[j] * sin(phase)
            re[i] = sr
            im[i] = si
    return re_arr, im_arr


def return_probability(weights, eigvals, thetas):
    re, im = spectral_sum(weights, eigvals, thetas)
    return re * re + im * im


def cascade_trials(uniforms, int depth, int k, double p_click, double dark,
                   double eta_dbl, bint residual, double photon_prob):
    cdef const double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t trials = u.shape[0], t
    cdef int n = 1 << depth
    cdef int node, leaf, clicks
    cdef bint present, ok, here
    cdef long long signal = 0, noise = 0
    reach_arr = np.zeros(2 * n, dtype=np.uint8)
    cdef unsigned char[::1] reach = reach_arr
    with nogil:
        for t in range(trials):
            present = u[t, 0] < photon_prob
            reach[1] = present
            clicks = 0
            for node in range(1, n):
                here = reach[node]
                ok = here and (u[t, node] < eta_dbl)
                reach[2 * node] = ok
                reach[2 * node + 1] = ok
                if residual:
                    if here and not ok:
                        clicks += u[t, 2 * n + node - 1] < p_click
                    else:
                        clicks += u[t, 2 * n + node - 1] < dark
            for leaf in range(n, 2 * n):
                if reach[leaf]:
                    clicks += u[t, leaf] < p_click
                else:
                    clicks += u[t, leaf] < dark
            if clicks >= k:
                if present:
                    signal += 1
                else:
                    noise += 1
    return int(signal), int(noise)

"""Independent reference implementations used only by the tests."""
import itertools
import math

import numpy as np
from scipy.linalg import expm


def annihilator(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(complex)


def kron_all(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def dense_hamiltonian(kind, cutoff, g=1.0):
    """Dense H in a product space with every mode truncated at ``cutoff`` photons."""
    a1 = annihilator(cutoff)
    eye = np.eye(cutoff + 1)
    if kind == "nondegenerate":
        a, b, c = (kron_all([a1 if i == j else eye for i in range(3)]) for j in range(3))
        h = g * b.conj().T @ c.conj().T @ a
    elif kind == "degenerate":
        a, b = (kron_all([a1 if i == j else eye for i in range(2)]) for j in range(2))
        h = g * b.conj().T @ b.conj().T @ a
    else:
        a, c = (kron_all([a1 if i == j else eye for i in range(2)]) for j in range(2))
        h = g * c.conj().T @ a
    return h + h.conj().T


def dense_evolve(kind, amplitudes, theta, cutoff, g=1.0):
    """exp(-i theta H) applied to a dict {occupation tuple: amplitude} by scipy expm."""
    nmodes = 3 if kind == "nondegenerate" else 2
    dim = cutoff + 1
    psi = np.zeros(dim**nmodes, dtype=complex)
    for occ, amp in amplitudes.items():
        psi[np.ravel_multi_index(occ, (dim,) * nmodes)] = amp
    out = expm(-1j * theta * dense_hamiltonian(kind, cutoff, g)) @ psi
    result = {}
    for flat in np.nonzero(np.abs(out) > 1e-14)[0]:
        result[tuple(int(x) for x in np.unravel_index(flat, (dim,) * nmodes))] = out[flat]
    return result


def cascade_click_distribution(depth, p_click, dark, eta_dbl, residual, photon):
    """P(j clicks) by enumerating every doubler outcome and every detector pattern."""
    n = 1 << depth
    doublers = n - 1
    dist = [0.0] * (2 * n)
    for outcomes in itertools.product((True, False), repeat=doublers if photon else 0):
        # heap-ordered tree: node i has children 2i+1, 2i+2; nodes >= n-1 are leaves
        # every doubler outcome is an independent draw, reached or not
        weight = math.prod(eta_dbl if ok else 1.0 - eta_dbl for ok in outcomes)
        lit, residual_lit = set(), set()
        frontier = [0] if photon else []
        while frontier:
            node = frontier.pop()
            if node >= doublers:
                lit.add(node - doublers)
                continue
            if outcomes[node]:
                frontier += [2 * node + 1, 2 * node + 2]
            elif residual:
                residual_lit.add(node)
        if weight == 0.0:
            continue
        probs = [p_click if i in lit else dark for i in range(n)]
        if residual:
            probs += [p_click if i in residual_lit else dark for i in range(doublers)]
        for pattern in itertools.product((0, 1), repeat=len(probs)):
            w = weight
            for hit, p in zip(pattern, probs):
                w *= p if hit else 1.0 - p
            dist[sum(pattern)] += w
    return dist


def cascade_enumeration(depth, k, p_click, dark, eta_dbl, residual, photon):
    """P(>= k clicks) from :func:`cascade_click_distribution`."""
    return math.fsum(cascade_click_distribution(depth, p_click, dark, eta_dbl, residual, photon)[k:])


def dense_beam_splitter(n1, n2, transmissivity, cutoff):
    """exp(i phi (a1+ a2 + a2+ a1)) with cos(phi) = sqrt(T), applied to |n1, n2>."""
    a = annihilator(cutoff)
    eye = np.eye(cutoff + 1)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    gen = a1.conj().T @ a2 + a2.conj().T @ a1
    phi = math.acos(math.sqrt(transmissivity))
    psi = np.zeros((cutoff + 1) ** 2, dtype=complex)
    psi[n1 * (cutoff + 1) + n2] = 1.0
    out = expm(1j * phi * gen) @ psi
    return {divmod(int(i), cutoff + 1): out[i] for i in np.nonzero(np.abs(out) > 1e-14)[0]}


def fock_transition(n, theta, j):
    """|<n-j, j, j| exp(-i theta H) |n, 0, 0>|^2 from a dense tridiagonal H built here."""
    dim = n + 1
    h = np.zeros((dim, dim))
    for k in range(n):
        h[k + 1, k] = h[k, k + 1] = math.sqrt((n - k) * (k + 1) * (k + 1))
    u = expm(-1j * theta * h)
    return abs(u[j, 0]) ** 2, u


def poisson_weights(mean, nmax):
    return [math.exp(-mean) * mean**n / math.factorial(n) for n in range(nmax + 1)]


def heralded_source_oracle(mean, steps, nmax=40):
    """Conditional herald rate and output distribution of the filter-then-double pipeline.

    Fock components never mix: filtering multiplies component n by its return
    amplitude, and a herald of one b photon from |n00> leaves exactly n photons in a + c.
    """
    weights = poisson_weights(mean, nmax)
    filtered = []
    for n, w in enumerate(weights):
        _, u = fock_transition(n, math.pi, 0)
        filtered.append(w * abs(u[0, 0]) ** (2 * steps))
    pass_prob = sum(filtered)
    herald = {n: filtered[n] * fock_transition(n, math.pi / 2, 1)[0] for n in range(1, nmax + 1)}
    h = sum(herald.values())
    return {
        "efficiency": h / pass_prob,
        "absolute": h,
        "pass": pass_prob,
        "output": {n: p / h for n, p in herald.items()},
        "filtered": [f / pass_prob for f in filtered],
    }


def pair_distribution_oracle(weights, theta):
    """P(k pairs) for an incoherent mixture {n: weight} of |n00> inputs."""
    out = {}
    for n, w in weights.items():
        _, u = fock_transition(n, theta, 0)
        for k in range(n + 1):
            out[k] = out.get(k, 0.0) + w * abs(u[k, 0]) ** 2
    return out

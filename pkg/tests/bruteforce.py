"""Independent reference computations for the test suite.

Reduced states are built by explicit index enumeration (no reshapes or
einsum) and every monotone is evaluated straight from its defining
entropy expression, so nothing here shares a code path with ``entgeom``.
"""
import itertools
import math

import numpy as np


def reduced(rho, dims, keep):
    n = len(dims)
    keep = sorted(keep)
    idx = list(itertools.product(*[range(d) for d in dims]))
    size = math.prod(dims[i] for i in keep) if keep else 1

    def flat(t, parties):
        f = 0
        for p in parties:
            f = f * dims[p] + t[p]
        return f

    out = np.zeros((size, size), dtype=complex)
    for a in idx:
        for b in idx:
            if all(a[i] == b[i] for i in range(n) if i not in keep):
                out[flat(a, keep), flat(b, keep)] += rho[flat(a, range(n)), flat(b, range(n))]
    return out


def entropy_bits(m):
    w = np.linalg.eigvalsh(m)
    w = w[w > 1e-14]
    return float(-(w * np.log2(w)).sum())


def entropy_table(rho, dims):
    n = len(dims)
    table = {(): 0.0}
    for r in range(1, n + 1):
        for c in itertools.combinations(range(n), r):
            table[c] = entropy_bits(reduced(rho, dims, c))
    return table


def _key(s):
    return tuple(sorted(s))


def metric(t, n, i, j):
    full = tuple(range(n))
    d = 2 * t[_key({i, j})] - t[(i,)] - t[(j,)]
    dt = 2 * t[full] - t[_key(set(full) - {i})] - t[_key(set(full) - {j})]
    return d - dt


def _cond(t, a, given):
    return t[_key(set(given) | {a})] - t[_key(given)]


def volume(t, n, sub):
    """Signed sum over even permutations of products of m-1 conditional entropies."""
    m = len(sub)
    full = set(range(n))
    v = vt = 0.0
    for p in itertools.permutations(sub):
        inversions = sum(1 for x in range(m) for y in range(x + 1, m) if p[x] > p[y])
        if inversions % 2:
            continue
        v += math.prod(_cond(t, p[s], set(sub) - {p[s]}) for s in range(m - 1))
        vt += math.prod(_cond(t, p[s], full - {p[s]}) for s in range(m - 1))
    return (-1) ** m * (v - vt)


def content(t, n):
    total = sum(metric(t, n, i, j) for i, j in itertools.combinations(range(n), 2))
    for m in range(3, n + 1):
        total += sum(volume(t, n, s) for s in itertools.combinations(range(n), m))
    return total


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def ghz_matrix(n):
    v = np.zeros(2**n)
    v[0] = v[-1] = 1
    return ket(*v)


def w_matrix(n):
    v = np.zeros(2**n)
    for k in range(n):
        v[1 << k] = 1
    return ket(*v)


def bell_matrix():
    return ket(1, 0, 0, 1)


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)

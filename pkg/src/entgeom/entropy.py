"""Von Neumann entropies (in bits) over the subset lattice of a multipartite state."""
from __future__ import annotations

import threading
from typing import Iterable

import numpy as np

from .tensor import TOL_PSD, MultipartiteState, NotPSD, SubsetError, as_subset, hermitian_eigenvalues, reduced_matrix

MAX_PARTIES = 16


def entropy_of_spectrum(eigs, tol_psd: float = TOL_PSD) -> float:
    """Shannon entropy (bits) of an eigenvalue list, clamping noise in [-tol_psd, 0] to 0."""
    w = np.asarray(eigs, dtype=float)
    if w.size and w.min() < -tol_psd:
        raise NotPSD(f"eigenvalue {w.min():.6g} below -{tol_psd:.1e}")
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w))) + 0.0


def matrix_entropy(m: np.ndarray) -> float:
    return entropy_of_spectrum(hermitian_eigenvalues(m))


def von_neumann_entropy(state: MultipartiteState) -> float:
    """S(rho) = -sum lambda log2 lambda over the clamped spectrum, 0 log 0 = 0."""
    return matrix_entropy(state.matrix)


class SubsystemEntropyCache:
    """Memoized ``subset -> S(rho_subset)`` table for one state.

    Lookups are thread-safe; each subset is diagonalized at most once even
    under concurrent access.

    >>> from entgeom.states import ghz
    >>> c = SubsystemEntropyCache(ghz(3))
    >>> c.entropy([0]), round(c.entropy([0, 1, 2]), 12)
    (1.0, 0.0)
    """

    def __init__(self, state: MultipartiteState):
        if state.n > MAX_PARTIES:
            raise ValueError(f"at most {MAX_PARTIES} parties supported, got {state.n}")
        self.state = state
        self._table: dict[tuple[int, ...], float] = {(): 0.0}
        self._locks: dict[tuple[int, ...], threading.Lock] = {}
        self._guard = threading.Lock()

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def full(self) -> tuple[int, ...]:
        return tuple(range(self.state.n))

    def entropy(self, subset: Iterable[int]) -> float:
        key = as_subset(subset, self.state.n)
        try:
            return self._table[key]
        except KeyError:
            pass
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._table:
                self._table[key] = matrix_entropy(reduced_matrix(self.state, key))
            return self._table[key]

    __call__ = entropy

    def table(self) -> dict[tuple[int, ...], float]:
        """Snapshot of everything computed so far."""
        with self._guard:
            return dict(self._table)

    def complement(self, subset: Iterable[int]) -> tuple[int, ...]:
        s = set(as_subset(subset, self.state.n))
        return tuple(i for i in range(self.state.n) if i not in s)


def subsystem_entropy(cache: SubsystemEntropyCache, subset: Iterable[int]) -> float:
    return cache.entropy(subset)


def _disjoint(*subsets: Iterable[int]) -> list[set[int]]:
    sets = [set(s) for s in subsets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                raise SubsetError(f"subsets overlap on {sorted(sets[i] & sets[j])}")
    return sets


def conditional_entropy(cache: SubsystemEntropyCache, x: Iterable[int], y: Iterable[int]) -> float:
    """S(x|y) = S(xy) - S(y); negative values signal entanglement."""
    sx, sy = _disjoint(x, y)
    return cache.entropy(sx | sy) - cache.entropy(sy)


def mutual_information(cache: SubsystemEntropyCache, a: Iterable[int], b: Iterable[int]) -> float:
    sa, sb = _disjoint(a, b)
    return cache.entropy(sa) + cache.entropy(sb) - cache.entropy(sa | sb)


def conditional_mutual_information(
    cache: SubsystemEntropyCache, a: Iterable[int], b: Iterable[int], c: Iterable[int]
) -> float:
    """I(a:b|c) = S(ac) + S(bc) - S(abc) - S(c)."""
    sa, sb, sc = _disjoint(a, b, c)
    return cache.entropy(sa | sc) + cache.entropy(sb | sc) - cache.entropy(sa | sb | sc) - cache.entropy(sc)

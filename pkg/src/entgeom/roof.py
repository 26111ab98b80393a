"""Ensemble averages and a heuristic convex-roof search.

Pure-state decompositions of a density matrix are generated from its
eigen-ensemble by k x r isometries (Schrodinger-HJW). The isometry is the
first ``rank`` columns of a product of phased Givens rotations, so a
decomposition is described by ``k (k - 1)`` real angles.

:func:`roof_minimize` returns an upper bound on the infimum over
decompositions. It is never the certified infimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .entropy import SubsystemEntropyCache
from .geometry import convoluted_area, convoluted_metric, convoluted_volume, entanglement_content_E
from .tensor import MultipartiteState, hermitian_eigenvalues

RANK_TOL = 1e-12
WEIGHT_TOL = 1e-14
MAX_EXTRA_MEMBERS = 4


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True)
class Functional:
    """A named monotone with its party arguments, callable on an entropy cache.

    ``name`` is one of ``"M"`` (args: two parties), ``"area"`` (three),
    ``"volume"`` (a subset of size >= 3) or ``"E"`` (args: optional
    ``normalize`` flag).
    """

    name: str
    args: tuple[Any, ...] = ()

    def __post_init__(self):
        if self.name not in ("M", "area", "volume", "E"):
            raise ValueError(f"unknown functional {self.name!r}")

    def __call__(self, cache: SubsystemEntropyCache) -> float:
        if self.name == "M":
            return convoluted_metric(cache, *self.args)
        if self.name == "area":
            return convoluted_area(cache, *self.args)
        if self.name == "volume":
            return convoluted_volume(cache, self.args)
        return entanglement_content_E(cache, normalize=bool(self.args and self.args[0]))


@dataclass(frozen=True)
class Ensemble:
    """Weighted states ``(p_j, rho_j)`` averaging to ``target``."""

    members: tuple[tuple[float, MultipartiteState], ...]
    target: MultipartiteState

    def __post_init__(self):
        if not self.members:
            raise EnsembleError("empty ensemble")
        weights = [p for p, _ in self.members]
        if any(not 0 < p <= 1 + 1e-12 for p in weights):
            raise EnsembleError(f"weights must lie in (0, 1], got {weights}")
        if abs(sum(weights) - 1) > 1e-9:
            raise EnsembleError(f"weights sum to {sum(weights)!r}")
        for _, s in self.members:
            if s.dims != self.target.dims:
                raise EnsembleError(f"member dims {s.dims} differ from target {self.target.dims}")
        err = float(np.max(np.abs(self.mixture() - self.target.matrix)))
        if err > 1e-8:
            raise EnsembleError(f"ensemble reconstructs target only to {err:.3e}")

    def mixture(self) -> np.ndarray:
        return sum(p * s.matrix for p, s in self.members)

    @property
    def weights(self) -> list[float]:
        return [p for p, _ in self.members]


def ensemble_average(ens: Ensemble, functional: Callable[[SubsystemEntropyCache], float]) -> float:
    """sum_j p_j f(rho_j)."""
    return float(sum(p * functional(SubsystemEntropyCache(s)) for p, s in ens.members))


def _eigen_purification(rho: MultipartiteState) -> tuple[np.ndarray, np.ndarray]:
    w, v = hermitian_eigenvalues(rho.matrix, vectors=True)
    r = int(np.sum(w > RANK_TOL))
    return np.clip(w[:r], 0, None), v[:, :r]


def state_rank(rho: MultipartiteState) -> int:
    return _eigen_purification(rho)[0].size


def n_params(k: int) -> int:
    return k * (k - 1)


def givens_unitary(k: int, params: Sequence[float]) -> np.ndarray:
    """Product of phased Givens rotations on all index pairs, in lexicographic order."""
    params = np.asarray(params, dtype=float)
    if params.size != n_params(k):
        raise ValueError(f"expected {n_params(k)} parameters for k={k}, got {params.size}")
    u = np.eye(k, dtype=complex)
    for t, (p, q) in enumerate(itertools.combinations(range(k), 2)):
        theta, phi = params[2 * t], params[2 * t + 1]
        c, s = math.cos(theta), math.sin(theta)
        g = np.eye(k, dtype=complex)
        g[p, p] = c
        g[p, q] = -np.exp(1j * phi) * s
        g[q, p] = np.exp(-1j * phi) * s
        g[q, q] = c
        u = u @ g
    return u


def _check_k(k: int, rank: int) -> None:
    if k < rank:
        raise EnsembleError(f"ensemble size {k} below rank {rank}")
    if k > rank + MAX_EXTRA_MEMBERS:
        raise EnsembleError(f"ensemble size {k} exceeds rank + {MAX_EXTRA_MEMBERS}")


def hjw_decompositions(rho: MultipartiteState, k: int, params: Sequence[float] | None = None) -> Ensemble:
    """Pure-state ensemble of ``k`` members obtained by rotating the purifying register.

    All-zero ``params`` give the eigen-ensemble. Members of vanishing weight
    are dropped.
    """
    w, v = _eigen_purification(rho)
    r = w.size
    _check_k(k, r)
    u = givens_unitary(k, np.zeros(n_params(k)) if params is None else params)[:, :r]
    # column j of `vecs` is the unnormalized member sum_i U[j, i] sqrt(w_i) v_i
    vecs = (v * np.sqrt(w)) @ u.T
    members = []
    for j in range(k):
        p = float(np.vdot(vecs[:, j], vecs[:, j]).real)
        if p <= WEIGHT_TOL:
            continue
        psi = vecs[:, j] / math.sqrt(p)
        m = np.outer(psi, psi.conj())
        m.setflags(write=False)
        members.append((p, MultipartiteState(rho.dims, m, rho.labels)))
    total = sum(p for p, _ in members)
    members = tuple((p / total, s) for p, s in members)
    return Ensemble(members, rho)


@dataclass
class RoofResult:
    value: float
    ensemble: Ensemble
    evaluations: int
    history: list[float] = field(default_factory=list, repr=False)

    def __iter__(self):
        yield self.value
        yield self.ensemble


def _candidates(dim: int, seed: int, step0: float, min_step: float):
    """Endless deterministic stream of parameter vectors to evaluate.

    The stream talks back: the caller sends the value of each candidate so
    coordinate descent can accept or reject moves.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.zeros(dim)
    restart = 0
    while True:
        if restart:
            x = rng.uniform(-math.pi, math.pi, dim)
        cur = yield x.copy()
        step = step0
        while step >= min_step:
            improved = False
            for c in range(dim):
                for sign in (1.0, -1.0):
                    moved = False
                    while True:
                        trial = x.copy()
                        trial[c] += sign * step
                        val = yield trial
                        if val >= cur:
                            break
                        x, cur, moved = trial, val, True
                    if moved:
                        improved = True
                        break
            if not improved:
                step /= 2
        restart += 1


def roof_minimize(
    rho: MultipartiteState,
    functional: Callable[[SubsystemEntropyCache], float],
    k: int | None = None,
    budget: int = 200,
    seed: int = 0,
    step0: float = math.pi / 4,
    min_step: float = 1e-6,
) -> RoofResult:
    """Upper bound on the convex roof of ``functional`` at ``rho``.

    Random-restart coordinate descent with step halving over the isometry
    angles, spending exactly ``budget`` functional evaluations (fewer when
    ``rho`` admits only one decomposition). The first candidate is always
    the eigen-ensemble, and candidates for a smaller budget are a prefix of
    those for a larger one, so the result is non-increasing in ``budget``.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rank = state_rank(rho)
    k = rank if k is None else int(k)
    _check_k(k, rank)
    dim = n_params(k)
    stream = _candidates(dim, seed, step0, min_step)
    x = next(stream)
    best_val, best_ens = math.inf, None
    history = []
    for used in range(1, budget + 1):
        ens = hjw_decompositions(rho, k, x)
        val = ensemble_average(ens, functional)
        history.append(val)
        if val < best_val:
            best_val, best_ens = val, ens
        if dim == 0 or rank == 1:
            break
        if used < budget:
            x = stream.send(val)
    return RoofResult(best_val, best_ens, len(history), history)

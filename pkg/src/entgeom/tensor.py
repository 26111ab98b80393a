"""Dense density-matrix primitives: validation, Kronecker products,
partial traces and partial transposes over party subsets.

Party ordering follows the order of ``dims`` everywhere; subset operations
preserve relative order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
MAX_DIM = 2**16


class StateError(ValueError):
    """Base class for invalid-state errors."""


class NotHermitian(StateError):
    pass


class NotUnitTrace(StateError):
    pass


class NotPSD(StateError):
    pass


class DimensionMismatch(StateError):
    pass


class SubsetError(ValueError):
    """Raised for out-of-range, duplicate or overlapping party indices."""


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """A validated density matrix together with its local dimensions.

    Construct through :func:`validate_density`; the stored matrix is a
    read-only copy of the input and is never repaired.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    labels: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return str(i)


def as_subset(indices: Iterable[int], n: int, allow_empty: bool = True) -> tuple[int, ...]:
    """Normalize ``indices`` to a strictly increasing tuple of valid party positions."""
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise SubsetError(f"duplicate party index in {idx}")
    for i in idx:
        if not 0 <= i < n:
            raise SubsetError(f"party index {i} out of range for {n} parties")
    if not idx and not allow_empty:
        raise SubsetError("empty party subset")
    return tuple(sorted(idx))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(kron, mats)


def _check_hermitian(m: np.ndarray, tol: float) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {m.shape}")
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |m_ij - conj(m_ji)| = {dev:.3e} exceeds {tol:.1e}")


def hermitian_eigenvalues(m: np.ndarray, vectors: bool = False, tol: float = TOL_HERM):
    """Real spectrum of a Hermitian matrix in descending order.

    With ``vectors=True`` returns ``(values, vecs)`` where ``vecs[:, i]`` is the
    eigenvector of ``values[i]``.
    """
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m, tol)
    h = (m + m.conj().T) / 2
    if vectors:
        w, v = np.linalg.eigh(h)
        return w[::-1].copy(), v[:, ::-1].copy()
    return np.linalg.eigvalsh(h)[::-1].copy()


def validate_density(
    m,
    dims: Sequence[int],
    labels: Sequence[str] | None = None,
    tol_herm: float = TOL_HERM,
    tol_trace: float = TOL_TRACE,
    tol_psd: float = TOL_PSD,
) -> MultipartiteState:
    """Check ``m`` is a density matrix on the space with local dimensions ``dims``.

    Raises one of :class:`DimensionMismatch`, :class:`NotHermitian`,
    :class:`NotUnitTrace` or :class:`NotPSD`. When several invariants fail,
    the message lists every failure; the exception type is the first one in
    that order.
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionMismatch(f"every local dimension must be >= 2, got {dims}")
    total = math.prod(dims)
    if total > MAX_DIM:
        raise DimensionMismatch(f"total dimension {total} exceeds {MAX_DIM}")
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape != (total, total):
        raise DimensionMismatch(f"matrix shape {arr.shape} does not match dims {dims} (side {total})")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != len(dims):
            raise DimensionMismatch(f"{len(labels)} labels for {len(dims)} parties")
    _check_hermitian(arr, tol_herm)

    failures: list[tuple[type, str]] = []
    tr = np.trace(arr)
    if abs(tr - 1) > tol_trace:
        failures.append((NotUnitTrace, f"trace {tr.real:.6g}{tr.imag:+.3g}j differs from 1"))
    lam_min = float(np.linalg.eigvalsh((arr + arr.conj().T) / 2)[0])
    if lam_min < -tol_psd:
        failures.append((NotPSD, f"minimum eigenvalue {lam_min:.6g} below -{tol_psd:.1e}"))
    if failures:
        raise failures[0][0]("; ".join(msg for _, msg in failures))

    arr.setflags(write=False)
    return MultipartiteState(dims, arr, labels)


def _tensor(state: MultipartiteState) -> np.ndarray:
    return state.matrix.reshape(state.dims + state.dims)


def reduced_matrix(state: MultipartiteState, keep: Sequence[int]) -> np.ndarray:
    """Matrix of the reduced state on ``keep`` (no validation round-trip)."""
    keep = as_subset(keep, state.n)
    n = state.n
    if keep == tuple(range(n)):
        return state.matrix
    if not keep:
        return np.array([[np.trace(state.matrix)]])
    traced = [i for i in range(n) if i not in keep]
    # einsum subscripts: row index letters 0..n-1, column letters n..2n-1;
    # traced parties share their row letter for both slots.
    row = list(range(n))
    col = [i if i in traced else n + i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    t = np.einsum(_tensor(state), row + col, out)
    d = math.prod(state.dims[i] for i in keep)
    return t.reshape(d, d)


def partial_trace(state: MultipartiteState, keep: Sequence[int]) -> MultipartiteState:
    """Reduced state on the parties in ``keep``."""
    keep = as_subset(keep, state.n, allow_empty=False)
    m = np.array(reduced_matrix(state, keep))
    m.setflags(write=False)
    labels = None if state.labels is None else tuple(state.labels[i] for i in keep)
    return MultipartiteState(tuple(state.dims[i] for i in keep), m, labels)


def partial_transpose(state: MultipartiteState, subset: Sequence[int]) -> np.ndarray:
    """Transpose the tensor indices of the parties in ``subset`` only."""
    subset = as_subset(subset, state.n)
    n = state.n
    axes = list(range(2 * n))
    for i in subset:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return _tensor(state).transpose(axes).reshape(state.dim, state.dim)


def compose(*states: MultipartiteState) -> MultipartiteState:
    """Tensor product of states with concatenated dims (and labels when all carry them)."""
    m = kron_all([s.matrix for s in states])
    dims = tuple(d for s in states for d in s.dims)
    labels = None
    if all(s.labels is not None for s in states):
        labels = tuple(l for s in states for l in s.labels)
    m.setflags(write=False)
    return MultipartiteState(dims, m, labels)


def apply_local_unitaries(state: MultipartiteState, unitaries: Sequence[np.ndarray]) -> MultipartiteState:
    """Conjugate ``state`` by the tensor product of per-party unitaries."""
    u = kron_all(unitaries)
    m = u @ state.matrix @ u.conj().T
    m = (m + m.conj().T) / 2
    m.setflags(write=False)
    return MultipartiteState(state.dims, m, state.labels)


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())

"""Reference entanglement quantifiers: Wootters concurrence and negativity."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .tensor import DimensionMismatch, MultipartiteState, as_subset, hermitian_eigenvalues, partial_transpose

_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_Y, _Y)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = hermitian_eigenvalues(m, vectors=True)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def concurrence(state: MultipartiteState) -> float:
    """Wootters concurrence of a two-qubit state.

    The values lambda_i are the singular values of sqrt(rho) sqrt(R), R the
    spin-flipped state. Taking them directly avoids the square root of
    rounding noise that an eigenvalue route through rho R would incur.
    """
    if state.dims != (2, 2):
        raise DimensionMismatch(f"concurrence needs dims (2, 2), got {state.dims}")
    s = _psd_sqrt(state.matrix)
    s_flipped = _YY @ s.conj() @ _YY  # sqrt of the flipped state
    lam = np.linalg.svd(s @ s_flipped, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def negativity(state: MultipartiteState, subset: Sequence[int]) -> float:
    """(||rho^{T_subset}||_1 - 1) / 2, i.e. minus the sum of negative PT eigenvalues."""
    subset = as_subset(subset, state.n, allow_empty=False)
    if len(subset) == state.n:
        raise ValueError("bipartition side must be a proper subset")
    pt = partial_transpose(state, subset)
    w = hermitian_eigenvalues(pt)
    return float(np.sum(np.abs(w[w < 0])))


def is_ppt(state: MultipartiteState, subset: Sequence[int], tol: float = 1e-10) -> bool:
    return negativity(state, subset) <= tol

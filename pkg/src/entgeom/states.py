"""Canonical and random states.

Random states use numpy's PCG64 generator, which produces the same stream on
every platform for a given seed. Sample ``i`` of a seeded batch uses the seed
``seed ^ i`` (see :func:`sample_seed`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .tensor import MAX_DIM, DimensionMismatch, MultipartiteState, compose, projector, validate_density

KINDS = ("bell", "ghz", "w", "product-basis", "random-mixed", "random-pure", "compose", "literal")


class SpecError(ValueError):
    """Malformed state specification. ``field`` names the offending entry."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class StateSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    children: tuple["StateSpec", ...] = ()
    labels: tuple[str, ...] | None = None


def sample_seed(seed: int, i: int) -> int:
    return int(seed) ^ int(i)


def rng_for(seed: int) -> np.random.Generator:
    if seed is None or int(seed) < 0:
        raise SpecError("seed must be a non-negative integer", "seed")
    return np.random.Generator(np.random.PCG64(int(seed)))


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionMismatch(f"local dimensions must all be >= 2, got {dims}")
    if math.prod(dims) > MAX_DIM:
        raise DimensionMismatch(f"total dimension {math.prod(dims)} exceeds {MAX_DIM}")
    return dims


def bell() -> MultipartiteState:
    """|Phi+><Phi+| on two qubits."""
    return validate_density(projector([1, 0, 0, 1]), (2, 2))


def ghz(n: int) -> MultipartiteState:
    if n < 2:
        raise SpecError("GHZ needs at least 2 parties", "n")
    _check_dims((2,) * n)
    v = np.zeros(2**n)
    v[0] = v[-1] = 1
    return validate_density(projector(v), (2,) * n)


def w_state(n: int) -> MultipartiteState:
    """Equal superposition of the ``n`` single-excitation basis states."""
    if n < 2:
        raise SpecError("W needs at least 2 parties", "n")
    _check_dims((2,) * n)
    v = np.zeros(2**n)
    for k in range(n):
        v[1 << k] = 1
    return validate_density(projector(v), (2,) * n)


def product_basis(dims: Sequence[int], indices: Sequence[int]) -> MultipartiteState:
    """Pure product of computational basis states ``|i_1>|i_2>...``."""
    dims = _check_dims(dims)
    if len(indices) != len(dims) or any(not 0 <= i < d for i, d in zip(indices, dims)):
        raise SpecError(f"basis indices {list(indices)} incompatible with dims {list(dims)}", "indices")
    flat = int(np.ravel_multi_index(tuple(int(i) for i in indices), dims))
    v = np.zeros(math.prod(dims))
    v[flat] = 1
    return validate_density(projector(v), dims)


def random_density_ginibre(dim: int, rank: int | None = None, seed: int = 0, dims: Sequence[int] | None = None) -> MultipartiteState:
    """rho = G G^dagger / tr(G G^dagger) with G a ``dim x rank`` complex Ginibre matrix.

    Full rank samples the Hilbert-Schmidt measure.
    """
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise SpecError(f"rank {rank} outside [1, {dim}]", "rank")
    dims = (dim,) if dims is None else _check_dims(dims)
    if math.prod(dims) != dim:
        raise DimensionMismatch(f"dims {dims} do not multiply to {dim}")
    return validate_density(ginibre_matrix(rng_for(seed), dim, rank), dims)


def ginibre_matrix(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    """Draw one normalized G G^dagger from ``rng`` (advances the generator)."""
    g = _complex_gaussian(rng, (dim, rank))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return (m + m.conj().T) / 2


def random_pure(dims: Sequence[int], seed: int) -> MultipartiteState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    dims = _check_dims(dims)
    v = _complex_gaussian(rng_for(seed), math.prod(dims))
    return validate_density(projector(v), dims)


def random_mixed(dims: Sequence[int], seed: int, rank: int | None = None) -> MultipartiteState:
    dims = _check_dims(dims)
    return random_density_ginibre(math.prod(dims), rank, seed, dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with the phase fix on R's diagonal."""
    q, r = np.linalg.qr(_complex_gaussian(rng, (d, d)))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _param(spec: StateSpec, name: str, default=None, required: bool = True):
    if name in spec.params:
        return spec.params[name]
    if required and default is None:
        raise SpecError(f"missing parameter for kind '{spec.kind}'", f"params.{name}")
    return default


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise SpecError(f"expected an integer, got {value!r}", f"params.{name}")
    return int(value)


def _as_dims(value, name: str = "dims") -> tuple[int, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise SpecError(f"expected a non-empty list of integers, got {value!r}", f"params.{name}")
    return tuple(_as_int(v, name) for v in value)


def _literal_matrix(value) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or not value:
        raise SpecError("expected a list of rows", "params.matrix")
    rows = []
    for r, row in enumerate(value):
        if not isinstance(row, (list, tuple)):
            raise SpecError(f"row {r} is not a list", "params.matrix")
        entries = []
        for c, z in enumerate(row):
            if isinstance(z, (int, float)) and not isinstance(z, bool):
                entries.append(complex(z))
            elif isinstance(z, (list, tuple)) and len(z) == 2 and all(isinstance(x, (int, float)) for x in z):
                entries.append(complex(z[0], z[1]))
            else:
                raise SpecError(f"entry ({r},{c}) must be a number or [re, im], got {z!r}", "params.matrix")
        rows.append(entries)
    if len({len(r) for r in rows}) != 1:
        raise SpecError("rows have unequal lengths", "params.matrix")
    return np.array(rows, dtype=complex)


def build_state(spec: StateSpec) -> MultipartiteState:
    """Materialize ``spec``; deterministic for a given spec (seeds included)."""
    kind = spec.kind
    if kind not in KINDS:
        raise SpecError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", "kind")
    if kind == "bell":
        state = bell()
    elif kind == "ghz":
        state = ghz(_as_int(_param(spec, "n"), "n"))
    elif kind == "w":
        state = w_state(_as_int(_param(spec, "n"), "n"))
    elif kind == "product-basis":
        dims = _as_dims(_param(spec, "dims"))
        idx = _param(spec, "indices", default=[0] * len(dims), required=False)
        state = product_basis(dims, [_as_int(i, "indices") for i in idx])
    elif kind == "random-mixed":
        dims = _as_dims(_param(spec, "dims"))
        rank = spec.params.get("rank")
        state = random_mixed(dims, _as_int(_param(spec, "seed"), "seed"), None if rank is None else _as_int(rank, "rank"))
    elif kind == "random-pure":
        state = random_pure(_as_dims(_param(spec, "dims")), _as_int(_param(spec, "seed"), "seed"))
    elif kind == "compose":
        if not spec.children:
            raise SpecError("compose needs at least one child", "children")
        parts = [build_state(c) for c in spec.children]
        total = math.prod(p.dim for p in parts)
        if total > MAX_DIM:
            raise DimensionMismatch(f"composed dimension {total} exceeds {MAX_DIM}")
        state = compose(*parts)
    else:
        m = _literal_matrix(_param(spec, "matrix"))
        dims = _as_dims(spec.params.get("dims", [m.shape[0]]))
        state = validate_density(m, dims)
    if spec.labels is not None:
        if len(spec.labels) != state.n:
            raise SpecError(f"{len(spec.labels)} labels for {state.n} parties", "labels")
        state = MultipartiteState(state.dims, state.matrix, tuple(spec.labels))
    return state

"""Entropic distances, convoluted metric/area/volumes and derived applications.

All quantities are built from subsystem entropies in bits. Parties are
integer positions into ``state.dims``. Functions accept either a
:class:`SubsystemEntropyCache` or a bare :class:`MultipartiteState`.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .entropy import SubsystemEntropyCache, conditional_mutual_information, mutual_information
from .tensor import MultipartiteState, SubsetError, as_subset, partial_trace

EPS_ISLAND = 1e-8
ZERO_TOL = 1e-8
CMI_CHECK_TOL = 1e-9
MAX_EXHAUSTIVE_PARTIES = 8


class NumericalInconsistency(ArithmeticError):
    """Two algebraically equal evaluation routes disagree."""


def _cache(x) -> SubsystemEntropyCache:
    if isinstance(x, SubsystemEntropyCache):
        return x
    if isinstance(x, MultipartiteState):
        return SubsystemEntropyCache(x)
    raise TypeError(f"expected a state or entropy cache, got {type(x).__name__}")


def _pair(cache: SubsystemEntropyCache, i: int, j: int) -> tuple[int, int]:
    (i,), (j,) = as_subset([i], cache.n), as_subset([j], cache.n)
    if i == j:
        raise SubsetError(f"parties must differ, got {i} twice")
    return i, j


def _need_remainder(cache: SubsystemEntropyCache, what: str) -> None:
    if cache.n < 3:
        raise SubsetError(f"{what} needs at least 3 parties, state has {cache.n}")


def _cond(cache: SubsystemEntropyCache, a: int, given: Iterable[int]) -> float:
    given = set(given)
    return cache.entropy(given | {a}) - cache.entropy(given)


def distance_D(cache, i: int, j: int) -> float:
    """S(i|j) + S(j|i) = 2 S(ij) - S(i) - S(j). Can be negative."""
    cache = _cache(cache)
    i, j = _pair(cache, i, j)
    return 2 * cache.entropy((i, j)) - cache.entropy((i,)) - cache.entropy((j,))


def distance_D_tilde(cache, i: int, j: int) -> float:
    """Same as :func:`distance_D` with each side also conditioned on every other party."""
    cache = _cache(cache)
    i, j = _pair(cache, i, j)
    _need_remainder(cache, "D-tilde")
    full = cache.full
    return (
        2 * cache.entropy(full)
        - cache.entropy([p for p in full if p != i])
        - cache.entropy([p for p in full if p != j])
    )


def metric_as_cmi(cache, i: int, j: int) -> float:
    """I(j:rest|i) + I(i:rest|j), the conditional-mutual-information form of M."""
    cache = _cache(cache)
    i, j = _pair(cache, i, j)
    _need_remainder(cache, "M")
    rest = [p for p in cache.full if p not in (i, j)]
    return conditional_mutual_information(cache, [j], rest, [i]) + conditional_mutual_information(cache, [i], rest, [j])


def convoluted_metric(cache, i: int, j: int) -> float:
    """M_ij = D_ij - D~_ij, cross-checked against the CMI form.

    Raises
    ------
    NumericalInconsistency
        If the two routes differ by more than 1e-9 bits.
    """
    cache = _cache(cache)
    m = distance_D(cache, i, j) - distance_D_tilde(cache, i, j)
    alt = metric_as_cmi(cache, i, j)
    if abs(m - alt) > CMI_CHECK_TOL:
        raise NumericalInconsistency(f"M({i},{j}) = {m!r} but CMI form gives {alt!r}")
    return m


def convoluted_area(cache, i: int, j: int, k: int) -> float:
    """Area - Area~ over the triple (i, j, k).

    Area is minus the sum, over the three unordered pairs of the triple, of
    products of conditional entropies of each party given the other two;
    Area~ conditions each party on all remaining parties instead.
    """
    cache = _cache(cache)
    _need_remainder(cache, "convoluted area")
    tri = as_subset([i, j, k], cache.n)
    if len(tri) != 3:
        raise SubsetError("area needs three distinct parties")
    full = set(cache.full)
    s = {a: _cond(cache, a, set(tri) - {a}) for a in tri}
    t = {a: _cond(cache, a, full - {a}) for a in tri}
    area = -(s[tri[0]] * s[tri[1]] + s[tri[0]] * s[tri[2]] + s[tri[2]] * s[tri[1]])
    area_t = -(t[tri[0]] * t[tri[1]] + t[tri[0]] * t[tri[2]] + t[tri[2]] * t[tri[1]])
    return area - area_t


def elementary_symmetric(values: Sequence[float], k: int) -> float:
    """e_k(values) by the standard O(n k) recurrence."""
    e = [1.0] + [0.0] * k
    for v in values:
        for r in range(k, 0, -1):
            e[r] += v * e[r - 1]
    return e[k]


def _volume_subset(cache: SubsystemEntropyCache, subset) -> tuple[int, ...]:
    sub = as_subset(subset, cache.n)
    if len(sub) < 3:
        raise SubsetError(f"volumes need at least 3 parties, got {len(sub)}")
    return sub


def conditional_profiles(cache, subset) -> tuple[list[float], list[float]]:
    """Per-party conditional entropies given the rest of ``subset`` and given everything else."""
    cache = _cache(cache)
    sub = _volume_subset(cache, subset)
    full = set(cache.full)
    inner = [_cond(cache, a, set(sub) - {a}) for a in sub]
    outer = [_cond(cache, a, full - {a}) for a in sub]
    return inner, outer


def _parity(perm: Sequence[int]) -> int:
    inv = sum(1 for x in range(len(perm)) for y in range(x + 1, len(perm)) if perm[x] > perm[y])
    return inv % 2


def _volume_by_permutations(values: Sequence[float]) -> float:
    m = len(values)
    total = 0.0
    for perm in itertools.permutations(range(m)):
        if _parity(perm):
            continue
        total += math.prod(values[perm[t]] for t in range(m - 1))
    return (-1) ** m * total


def _volume_closed(values: Sequence[float]) -> float:
    m = len(values)
    return (-1) ** m * (math.factorial(m - 1) / 2) * elementary_symmetric(values, m - 1)


def convoluted_volume(cache, subset, method: str = "closed") -> float:
    """(m-1)-dimensional convoluted volume V - V~ over ``subset`` (m >= 3).

    ``method="permutations"`` sums products of m-1 conditional entropies over
    the even permutations of the subset; ``"closed"`` uses the equivalent
    ``(-1)^m (m-1)!/2 * e_{m-1}`` form, which stays cheap for large m.
    """
    inner, outer = conditional_profiles(cache, subset)
    if method == "closed":
        f = _volume_closed
    elif method == "permutations":
        f = _volume_by_permutations
    else:
        raise ValueError(f"unknown method {method!r}")
    return f(inner) - f(outer)


def subset_monotone(cache, subset) -> float:
    """The monotone of matching order over ``subset``: M, area or volume.

    The full party set has nothing to be entangled with and gives 0.
    """
    cache = _cache(cache)
    sub = as_subset(subset, cache.n)
    if len(sub) < 2:
        raise SubsetError("monotones need at least 2 parties")
    if len(sub) == cache.n:
        return 0.0
    if len(sub) == 2:
        return convoluted_metric(cache, *sub)
    if len(sub) == 3:
        return convoluted_area(cache, *sub)
    return convoluted_volume(cache, sub)


def entanglement_content_E(cache, normalize: bool = False) -> float:
    """Sum of every pair M, triple area and higher volume over unordered subsets.

    With ``normalize`` the result is scaled so that Bell x Bell scores 2.
    """
    cache = _cache(cache)
    _need_remainder(cache, "E")
    n = cache.n
    total = sum(convoluted_metric(cache, i, j) for i, j in itertools.combinations(range(n), 2))
    total += sum(convoluted_area(cache, *t) for t in itertools.combinations(range(n), 3))
    for m in range(4, n + 1):
        total += sum(convoluted_volume(cache, s) for s in itertools.combinations(range(n), m))
    if normalize:
        return total / e_normalization()
    return total


@functools.cache
def bell_bell_e_raw() -> float:
    from .states import bell
    from .tensor import compose

    return entanglement_content_E(SubsystemEntropyCache(compose(bell(), bell())))


def e_normalization() -> float:
    """Divisor that maps raw E onto the Bell x Bell = 2 scale."""
    return bell_bell_e_raw() / 2


@dataclass
class GeometryReport:
    n: int
    pair_metric: dict[tuple[int, int], float]
    triple_area: dict[tuple[int, int, int], float]
    volumes: dict[tuple[int, ...], float]
    e_raw: float
    e_normalized: float

    def metric(self, i: int, j: int) -> float:
        return self.pair_metric[(min(i, j), max(i, j))]

    def to_dict(self) -> dict:
        key = lambda t: ",".join(map(str, t))
        return {
            "n": self.n,
            "pair_metric": {key(k): v for k, v in self.pair_metric.items()},
            "triple_area": {key(k): v for k, v in self.triple_area.items()},
            "volumes": {key(k): v for k, v in self.volumes.items()},
            "e_raw": self.e_raw,
            "e_normalized": self.e_normalized,
        }


def geometry_report(state, volume_sizes: Iterable[int] | None = None) -> GeometryReport:
    """Evaluate every pair metric, triple area, requested volumes and E.

    ``volume_sizes`` defaults to all sizes 4..n.
    """
    cache = _cache(state)
    _need_remainder(cache, "a geometry report")
    n = cache.n
    pairs = {p: convoluted_metric(cache, *p) for p in itertools.combinations(range(n), 2)}
    triples = {t: convoluted_area(cache, *t) for t in itertools.combinations(range(n), 3)}
    sizes = range(4, n + 1) if volume_sizes is None else sorted(set(volume_sizes))
    vols = {}
    for m in sizes:
        if not 4 <= m <= n:
            raise SubsetError(f"volume size {m} outside 4..{n}")
        for s in itertools.combinations(range(n), m):
            vols[s] = convoluted_volume(cache, s)
    e_raw = entanglement_content_E(cache)
    return GeometryReport(n, pairs, triples, vols, e_raw, e_raw / e_normalization())


# --- Ono's inequality --------------------------------------------------------


@dataclass
class OnoReport:
    """Ono's triangle inequality evaluated on metric side lengths.

    ``a``, ``b``, ``c`` are M_AB, M_AC, M_BC. Bracket ``0`` is a^2+b^2-c^2,
    ``1`` is a^2+c^2-b^2 and ``2`` is b^2+c^2-a^2.
    """

    a: float
    b: float
    c: float
    area: float
    lhs: float
    rhs: float
    holds: bool
    forced_zero_brackets: list[int]
    brackets: tuple[float, float, float]
    acute_or_right: bool
    ab_branches: tuple[float, ...] = ()
    selected_ab: float | None = None
    contradiction: bool = False


def _ono_brackets(a: float, b: float, c: float) -> tuple[float, float, float]:
    return (a * a + b * b - c * c, a * a + c * c - b * b, c * c + b * b - a * a)


def monogamy_branches(m_ac: float, m_bc: float) -> tuple[float, ...]:
    """Nonnegative M_AB values that zero at least one Ono bracket."""
    b2, c2 = m_ac * m_ac, m_bc * m_bc
    roots = {math.sqrt(b2 + c2)}
    for sq in (c2 - b2, b2 - c2):
        if sq >= -ZERO_TOL:
            roots.add(math.sqrt(max(sq, 0.0)))
    return tuple(sorted(roots))


def ono_check(m_ab: float | None, m_ac: float, m_bc: float, area: float, m_max: float | None = None) -> OnoReport:
    """Evaluate 27 * prod(brackets^2) <= (4 * area)^6.

    Passing ``m_ab=None`` resolves M_AB from the degenerate case instead: the
    candidate values zeroing a bracket are listed in ``ab_branches`` and the
    largest one not exceeding ``m_max`` (default ``max(m_ac, m_bc)``, the
    maximal-entanglement premise) is selected. ``contradiction`` is set when
    the premise M_AB != 0 cannot survive: either the given M_AB violates the
    inequality, or the selected branch is 0.
    """
    for name, v in (("m_ac", m_ac), ("m_bc", m_bc)) + ((("m_ab", m_ab),) if m_ab is not None else ()):
        if v < 0:
            raise ValueError(f"side {name} is negative ({v})")
    branches: tuple[float, ...] = ()
    selected = None
    if m_ab is None:
        branches = monogamy_branches(m_ac, m_bc)
        cap = max(m_ac, m_bc) if m_max is None else m_max
        admissible = [x for x in branches if x <= cap + ZERO_TOL]
        selected = max(admissible) if admissible else min(branches)
        a = selected
    else:
        a = m_ab
    b, c = m_ac, m_bc
    br = _ono_brackets(a, b, c)
    lhs = 27 * math.prod(x * x for x in br)
    rhs = (4 * area) ** 6
    holds = lhs <= rhs + 1e-12
    forced = [i for i, x in enumerate(br) if abs(x) <= ZERO_TOL]
    if m_ab is None:
        contradiction = selected <= ZERO_TOL
    else:
        contradiction = not holds
    return OnoReport(
        a, b, c, area, lhs, rhs, holds, forced, br, all(x >= -ZERO_TOL for x in br),
        branches, selected, contradiction,
    )


# --- island filtering and categorization -------------------------------------


@dataclass
class IslandReport:
    queried_subset: tuple[int, ...] | None
    monotone_value: float | None
    is_island: bool | None
    partition: list[tuple[int, ...]] | None = None
    epsilon: float = EPS_ISLAND


def _split_block(state: MultipartiteState, block: tuple[int, ...], eps: float) -> list[tuple[int, ...]]:
    if len(block) == 1:
        return [block]
    sub = partial_trace(state, block)
    cache = SubsystemEntropyCache(sub)
    b = len(block)
    local = tuple(range(b))
    if b == 2:
        # no remainder inside a 2-block: fall back to mutual information
        if mutual_information(cache, [0], [1]) <= eps:
            return [(block[0],), (block[1],)]
        return [block]
    rest = local[1:]
    for r in range(0, b - 1):
        for others in itertools.combinations(rest, r):
            side = (0,) + others
            comp = tuple(p for p in local if p not in side)
            probe = side if len(side) >= 2 else comp
            if abs(subset_monotone(cache, probe)) <= eps:
                left = tuple(block[p] for p in side)
                right = tuple(block[p] for p in comp)
                return _split_block(state, left, eps) + _split_block(state, right, eps)
    return [block]


def filter_islands(
    state: MultipartiteState,
    query: Sequence[int] | None = None,
    exhaustive: bool = False,
    eps: float = EPS_ISLAND,
    cache: SubsystemEntropyCache | None = None,
) -> IslandReport:
    """Decide whether ``query`` is decoupled from the rest, or partition all parties.

    Query mode evaluates the single monotone of order ``|query| - 1``; a
    subset is an island when that value vanishes, ``|value| <= eps``. Direct
    evaluation on mixed states can give negative areas and volumes, so the
    test is two-sided.
    Exhaustive mode splits recursively along any bipartition whose monotone
    vanishes, giving the finest partition into islands.
    """
    if query is None and not exhaustive:
        raise ValueError("give a query subset or request exhaustive mode")
    report = IslandReport(None, None, None, None, eps)
    if query is not None:
        q = as_subset(query, state.n)
        if len(q) < 2:
            raise SubsetError("query must contain at least 2 parties")
        value = subset_monotone(cache or SubsystemEntropyCache(state), q)
        report.queried_subset, report.monotone_value, report.is_island = q, value, abs(value) <= eps
    if exhaustive:
        if state.n > MAX_EXHAUSTIVE_PARTIES:
            raise ValueError(f"exhaustive search limited to {MAX_EXHAUSTIVE_PARTIES} parties, got {state.n}")
        parts = _split_block(state, tuple(range(state.n)), eps)
        report.partition = sorted(parts)
    return report


@dataclass
class CategoryReport:
    pair_metric: dict[tuple[int, int], float]
    triple_area: dict[tuple[int, int, int], float]
    vanishing_pairs: list[tuple[int, int]]
    vanishing_triples: list[tuple[int, int, int]]
    islands: list[tuple[int, ...]]
    eps: float = ZERO_TOL
    groups: dict[int, int] = field(default_factory=dict)

    @property
    def pattern(self) -> str:
        if all(len(p) == 1 for p in self.islands):
            return "fully separable"
        sizes = sorted((len(p) for p in self.islands if len(p) > 1), reverse=True)
        return " + ".join(f"{k}-party" for k in sizes)


def categorize(state: MultipartiteState, eps: float = ZERO_TOL) -> CategoryReport:
    """Vanishing pattern of all pair metrics and triple areas for n >= 4 parties."""
    if state.n < 4:
        raise SubsetError(f"categorization needs at least 4 parties, got {state.n}")
    cache = SubsystemEntropyCache(state)
    n = state.n
    pairs = {p: convoluted_metric(cache, *p) for p in itertools.combinations(range(n), 2)}
    triples = {t: convoluted_area(cache, *t) for t in itertools.combinations(range(n), 3)}
    islands = []
    if n <= MAX_EXHAUSTIVE_PARTIES:
        islands = filter_islands(state, exhaustive=True, eps=eps).partition
    groups: dict[int, int] = {}
    for p in islands:
        groups[len(p)] = groups.get(len(p), 0) + 1
    return CategoryReport(
        pairs,
        triples,
        [p for p, v in pairs.items() if abs(v) <= eps],
        [t for t, v in triples.items() if abs(v) <= eps],
        islands,
        eps,
        groups,
    )

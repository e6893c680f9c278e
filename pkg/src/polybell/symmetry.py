"""Local symmetry group of the bipartite composition acting on effect subsets.

The group is the product of two single-system dihedral groups (order 4n^2).
Its elements permute the n^2 product effects; the index of e_i (x) e_j is
n*(i-1)+j.  Subsets of 8 product effects are stored as integer bitmasks with
bit p standing for index p+1, so the numeric order on masks is the colex
order on subsets.  An orbit's canonical member is its smallest mask.

Orbit streaming walks all C(n^2, 8) subsets in mask order while keeping a
byte map of already-orbit-covered subsets (indexed by colex rank): a subset
not yet covered is necessarily the minimum of a fresh orbit, and expanding
that orbit only marks larger masks.  Memory is C(n^2, 8) bytes (30 MB for
n=6); larger n work but have no reference counts to compare against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import composite
from .errors import InternalInconsistencyError, InvalidParameterError
from .polygon import PolygonModel, build_model, effect_permutation, mod1, transformation

SUBSET_SIZE = 8  # facet equalities needed to pin one bipartite extreme state


@dataclass(frozen=True, eq=False)
class GroupElement:
    """One local pair T_{k1}^{s1} (x) T_{k2}^{s2} with its cached index action."""

    n: int
    k1: int
    s1: int
    k2: int
    s2: int
    perm: np.ndarray      # (n*n,) int64, 0-based product-index permutation
    matrix_a: np.ndarray
    matrix_b: np.ndarray

    @property
    def label(self) -> tuple[int, int, int, int]:
        return (self.k1, self.s1, self.k2, self.s2)

    @property
    def is_identity(self) -> bool:
        return self.k1 == self.n and self.s1 == 1 and self.k2 == self.n and self.s2 == 1


def _single_actions(model: PolygonModel) -> list[tuple[tuple[int, int], np.ndarray, np.ndarray]]:
    """((k, s), 0-based effect permutation, matrix) for all 2n local maps."""
    out = []
    for s in (1, -1):
        for k in range(1, model.n + 1):
            t = transformation(model, k, s)
            perm = np.array(effect_permutation(model, t), dtype=np.int64) - 1
            out.append(((k, s), perm, t.matrix))
    return out


def _pair_perm(n: int, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Product-index permutation from the two local effect permutations."""
    return (pa[:, None] * n + pb[None, :]).reshape(-1)


def group_elements(model: PolygonModel) -> list[GroupElement]:
    """All 4n^2 local pairs, in a fixed deterministic order."""
    singles = _single_actions(model)
    n = model.n
    out = []
    for (k1, s1), pa, ma in singles:
        for (k2, s2), pb, mb in singles:
            out.append(GroupElement(
                n=n, k1=k1, s1=s1, k2=k2, s2=s2,
                perm=_pair_perm(n, pa, pb), matrix_a=ma, matrix_b=mb))
    return out


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Group product g.h (h acts first)."""
    if g.n != h.n:
        raise InvalidParameterError("cannot compose elements of different models")
    n = g.n
    k1 = mod1(g.k1 + g.s1 * h.k1, n)
    k2 = mod1(g.k2 + g.s2 * h.k2, n)
    return GroupElement(
        n=n, k1=k1, s1=g.s1 * h.s1, k2=k2, s2=g.s2 * h.s2,
        perm=g.perm[h.perm],
        matrix_a=g.matrix_a @ h.matrix_a, matrix_b=g.matrix_b @ h.matrix_b)


# ---------------------------------------------------------------------------
# Subsets as bitmasks
# ---------------------------------------------------------------------------

def product_index(n: int, i: int, j: int) -> int:
    """1-based index of e_i (x) e_j among the n^2 product effects."""
    return n * (i - 1) + j


def mask_from_indices(indices) -> int:
    mask = 0
    for idx in indices:
        mask |= 1 << (idx - 1)
    return mask


def indices_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def act(g: GroupElement, mask: int) -> int:
    """Image of a subset bitmask under the cached index permutation."""
    perm = g.perm
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << int(perm[low.bit_length() - 1])
        mask ^= low
    return out


def canonical_form(mask: int, group: list[GroupElement]) -> int:
    """Smallest bitmask in the orbit of ``mask``."""
    return min(act(g, mask) for g in group)


def is_canonical(mask: int, group: list[GroupElement]) -> bool:
    return mask == canonical_form(mask, group)


# ---------------------------------------------------------------------------
# Fixed points and orbit counting
# ---------------------------------------------------------------------------

def cycle_lengths(perm: np.ndarray) -> list[int]:
    seen = np.zeros(len(perm), dtype=bool)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = int(perm[j])
            length += 1
        out.append(length)
    return out


def fixed_subset_count(g: GroupElement, size: int = SUBSET_SIZE) -> int:
    """Number of ``size``-subsets invariant under g.

    A subset is invariant exactly when it is a union of whole cycles of g's
    index permutation, so this is a subset-sum count over cycle lengths
    (exact integer arithmetic).
    """
    dp = [0] * (size + 1)
    dp[0] = 1
    for length in cycle_lengths(g.perm):
        if length <= size:
            for t in range(size, length - 1, -1):
                dp[t] += dp[t - length]
    return dp[size]


def burnside_orbit_count(n, size: int = SUBSET_SIZE) -> int:
    """Orbit count: group-average of the fixed-subset counts."""
    model = n if isinstance(n, PolygonModel) else build_model(n)
    group = group_elements(model)
    total = sum(fixed_subset_count(g, size) for g in group)
    if total % len(group):
        raise InternalInconsistencyError(
            f"fixed-point total {total} is not divisible by group order {len(group)}")
    return total // len(group)


def fixed_point_grid(model: PolygonModel, size: int = SUBSET_SIZE) -> np.ndarray:
    """(2n, 2n) fixed-subset counts, one row/column per local map.

    Rows and columns run over the single-system maps in the order
    identity, r, r^2, ..., r^(n-1), f, r f, ..., r^(n-1) f, where r is the
    elementary rotation and f the reflection fixing the first effect pairing
    (r^m corresponds to (k=m, s=+1) and r^m f to (k=m, s=-1), with m=n for
    the identity slot).
    """
    singles = {(k, s): perm for (k, s), perm, _ in _single_actions(model)}
    order = [(model.n, 1)] + [(k, 1) for k in range(1, model.n)]
    order += [(model.n, -1)] + [(k, -1) for k in range(1, model.n)]
    grid = np.zeros((2 * model.n, 2 * model.n), dtype=np.int64)
    for a, la in enumerate(order):
        for b, lb in enumerate(order):
            perm = _pair_perm(model.n, singles[la], singles[lb])
            dp = [0] * (size + 1)
            dp[0] = 1
            for length in cycle_lengths(perm):
                if length <= size:
                    for t in range(size, length - 1, -1):
                        dp[t] += dp[t - length]
            grid[a, b] = dp[size]
    return grid


# ---------------------------------------------------------------------------
# Orbit representative streaming
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSummary:
    representative: int  # canonical bitmask
    size: int


def _comb_table(nmax: int, k: int) -> np.ndarray:
    table = np.zeros((nmax + 1, k + 1), dtype=np.int64)
    table[:, 0] = 1
    for i in range(1, nmax + 1):
        for j in range(1, k + 1):
            table[i, j] = table[i - 1, j - 1] + table[i - 1, j]
    return table


def _colex_unrank(rank: int, nmax: int, k: int, table: np.ndarray) -> np.ndarray:
    # greedy from the largest element down
    out = np.empty(k, dtype=np.int64)
    for pos in range(k, 0, -1):
        lo, hi = pos - 1, nmax - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if table[mid, pos] <= rank:
                lo = mid
            else:
                hi = mid - 1
        out[pos - 1] = lo
        rank -= int(table[lo, pos])
    return out


def orbit_summaries(model: PolygonModel, size: int = SUBSET_SIZE,
                    order: str = "min", chunk: int = 1 << 18):
    """Yield one OrbitSummary per orbit of ``size``-subsets, each exactly once.

    ``order="min"`` yields canonical (smallest-mask) representatives in
    ascending mask order; ``order="max"`` yields largest-mask representatives
    in descending order.  On exhaustion the total is checked against the
    orbit count, so a silently broken walk cannot go unnoticed.
    """
    if order not in ("min", "max"):
        raise InvalidParameterError(f"order must be 'min' or 'max', got {order!r}")
    n2 = model.n * model.n
    if size > n2:
        raise InvalidParameterError(f"subset size {size} exceeds {n2} product effects")
    perms = np.array([g.perm for g in group_elements(model)])
    table = _comb_table(n2, size)
    total = int(table[n2, size])
    weights = np.zeros((n2, size), dtype=np.int64)
    for c in range(n2):
        for kk in range(size):
            weights[c, kk] = table[c, kk + 1]
    seen = np.zeros(total, dtype=bool)
    cols = np.arange(size)
    yielded = 0
    positions = range(0, total, chunk)
    for start in (positions if order == "min" else reversed(positions)):
        stop = min(start + chunk, total)
        block = np.nonzero(~seen[start:stop])[0] + start
        for rank in (block if order == "min" else block[::-1]):
            if seen[rank]:
                continue
            subset = _colex_unrank(int(rank), n2, size, table)
            images = np.sort(perms[:, subset], axis=1)
            ranks = weights[images, cols[None, :]].sum(axis=1)
            seen[ranks] = True
            yielded += 1
            yield OrbitSummary(representative=_mask_from_array(subset),
                               size=len(np.unique(ranks)))
    expected = burnside_orbit_count(model, size)
    if yielded != expected:
        raise InternalInconsistencyError(
            f"streamed {yielded} orbit representatives, expected {expected}")


def _mask_from_array(subset: np.ndarray) -> int:
    mask = 0
    for c in subset:
        mask |= 1 << int(c)
    return mask


def orbit_representatives(model: PolygonModel, size: int = SUBSET_SIZE,
                          order: str = "min"):
    """Stream the canonical subset of every orbit (see orbit_summaries)."""
    for summary in orbit_summaries(model, size=size, order=order):
        yield summary.representative


# ---------------------------------------------------------------------------
# Orbit of a bipartite state
# ---------------------------------------------------------------------------

def state_orbit(phi, model: PolygonModel) -> list[np.ndarray]:
    """Deduplicated images of ``phi`` under all local pairs, in group order."""
    out = []
    keys = set()
    for g in group_elements(model):
        img = composite.apply_local(g, phi)
        key = composite.state_key(img)
        if key not in keys:
            keys.add(key)
            out.append(img)
    return out

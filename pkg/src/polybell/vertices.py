"""Enumerate all extreme bipartite states and group them into classes.

Pipeline: every orbit of 8-element product-effect subsets contributes one
candidate linear system (8 vanishing-probability equations plus
normalization).  Nonsingular systems are solved; solutions passing the full
positivity scan are extreme states, and their group orbits are expanded and
deduplicated into the complete vertex set of the composite state space.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass

import numpy as np

from . import composite, symmetry
from .composite import (
    canonical_entangled_states, is_symmetric, is_valid_state, normalization_row,
    product_effect_rows, product_state, state_key,
)
from .errors import InternalInconsistencyError, InvalidParameterError
from .polygon import TOLERANCE, PolygonModel

RANK_DEFICIENT = "rank_deficient"
POSITIVITY_VIOLATED = "positivity_violated"
EXTREME = "extreme"

RANK_TOLERANCE = 1e-9        # relative pivot cutoff for the 9x9 systems
POSITIVITY_TOLERANCE = 1e-9

_SOLVE_CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class CandidateSolution:
    subset: int                      # bitmask over product-effect indices
    state: np.ndarray | None
    status: str


def solve_candidate(model: PolygonModel, mask: int,
                    rank_tol: float = RANK_TOLERANCE,
                    pos_tol: float = POSITIVITY_TOLERANCE) -> CandidateSolution:
    """Solve the 9x9 system pinned by one 8-subset of product effects."""
    indices = symmetry.indices_from_mask(mask)
    if len(indices) != symmetry.SUBSET_SIZE:
        raise InvalidParameterError(
            f"subset must have {symmetry.SUBSET_SIZE} effects, got {len(indices)}")
    rows = product_effect_rows(model)
    a = np.vstack([rows[[i - 1 for i in indices]], normalization_row()])
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= rank_tol * sv[0]:
        return CandidateSolution(subset=mask, state=None, status=RANK_DEFICIENT)
    b = np.zeros(9)
    b[8] = 1.0
    vec = np.linalg.solve(a, b)
    if (rows @ vec).min() < -pos_tol:
        return CandidateSolution(subset=mask, state=None, status=POSITIVITY_VIOLATED)
    return CandidateSolution(subset=mask, state=vec.reshape(3, 3), status=EXTREME)


def _solve_block(rows: np.ndarray, norm_row: np.ndarray, subsets: np.ndarray,
                 rank_tol: float, pos_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized solve of many 9x9 systems; returns (status codes, solutions)."""
    count = subsets.shape[0]
    a = np.empty((count, 9, 9))
    a[:, :8, :] = rows[subsets]
    a[:, 8, :] = norm_row
    sv = np.linalg.svd(a, compute_uv=False)
    nonsingular = sv[:, -1] > rank_tol * sv[:, 0]
    status = np.zeros(count, dtype=np.int8)  # 0 rank-deficient
    solutions = np.full((count, 9), np.nan)
    idx = np.nonzero(nonsingular)[0]
    if idx.size:
        b = np.zeros((idx.size, 9, 1))
        b[:, 8, 0] = 1.0
        sols = np.linalg.solve(a[idx], b)[..., 0]
        solutions[idx] = sols
        positive = (sols @ rows.T).min(axis=1) >= -pos_tol
        status[idx] = np.where(positive, 2, 1)  # 2 extreme, 1 positivity violated
    return status, solutions


def _solve_block_args(args):
    return _solve_block(*args)


@dataclass(eq=False)
class EnumerationResult:
    n: int
    vertices: list[np.ndarray]
    status_counts: dict[str, int]
    representative_count: int
    product_count: int = 0
    entangled_count: int = 0


def enumerate_extreme_states(model: PolygonModel, workers: int = 1,
                             representative_order: str = "min",
                             rank_tol: float = RANK_TOLERANCE,
                             pos_tol: float = POSITIVITY_TOLERANCE) -> EnumerationResult:
    """Complete vertex set of the maximal bipartite composition.

    One candidate system is solved per subset orbit; solutions are expanded
    through the full group and deduplicated in representative order, so the
    output order is deterministic for a fixed ``representative_order``.
    Every returned vertex is re-certified (validity plus facet rank 9).
    """
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    rows = product_effect_rows(model)
    norm_row = normalization_row()
    masks = list(symmetry.orbit_representatives(model, order=representative_order))
    subsets = np.array(
        [[i - 1 for i in symmetry.indices_from_mask(m)] for m in masks],
        dtype=np.int64)

    blocks = [subsets[start:start + _SOLVE_CHUNK]
              for start in range(0, len(subsets), _SOLVE_CHUNK)]
    tasks = [(rows, norm_row, block, rank_tol, pos_tol) for block in blocks]
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            solved = pool.map(_solve_block_args, tasks)
    else:
        solved = [_solve_block_args(task) for task in tasks]
    status = np.concatenate([s for s, _ in solved]) if solved else np.zeros(0, np.int8)
    solutions = np.concatenate([v for _, v in solved]) if solved else np.zeros((0, 9))

    counts = {
        RANK_DEFICIENT: int((status == 0).sum()),
        POSITIVITY_VIOLATED: int((status == 1).sum()),
        EXTREME: int((status == 2).sum()),
    }

    group = symmetry.group_elements(model)
    pairs = [(g.matrix_a, g.matrix_b) for g in group]
    seen: set[tuple] = set()
    vertices: list[np.ndarray] = []
    for pos in np.nonzero(status == 2)[0]:
        phi = solutions[pos].reshape(3, 3)
        for ta, tb in pairs:
            image = ta @ phi @ tb.T
            key = state_key(image)
            if key not in seen:
                seen.add(key)
                vertices.append(image)

    for phi in vertices:
        if not composite.is_extreme_state(phi, model):
            raise InternalInconsistencyError(
                "an enumerated vertex failed its extremality certificate")

    result = EnumerationResult(
        n=model.n, vertices=vertices, status_counts=counts,
        representative_count=len(masks))
    product_keys = _product_state_keys(model)
    result.product_count = sum(1 for v in vertices if state_key(v) in product_keys)
    result.entangled_count = len(vertices) - result.product_count
    return result


def _product_state_keys(model: PolygonModel) -> set[tuple]:
    keys = set()
    for i in range(1, model.n + 1):
        for j in range(1, model.n + 1):
            keys.add(state_key(product_state(model.state(i), model.state(j))))
    return keys


@dataclass(eq=False)
class EntanglementClass:
    representative: np.ndarray
    members: list[np.ndarray]
    size: int
    matched_name: str | None
    symmetric: bool
    swap_related_to: int | None = None


def classify_entangled(states, model: PolygonModel,
                       match_tol: float = 1e-6) -> list[EntanglementClass]:
    """Partition the entangled vertices into local-symmetry classes.

    Product states are removed first; the rest split into group orbits.
    Classes are sorted by (size, representative key); each is labeled with
    the name of the canonical library state it contains, if any, and linked
    to the class its transpose (side swap) lands in.
    """
    product_keys = _product_state_keys(model)
    remaining: dict[tuple, np.ndarray] = {}
    for phi in states:
        key = state_key(phi)
        if key not in product_keys:
            remaining.setdefault(key, np.asarray(phi, float))

    raw_classes: list[list[np.ndarray]] = []
    while remaining:
        _, seed = next(iter(remaining.items()))
        members = symmetry.state_orbit(seed, model)
        for member in members:
            remaining.pop(state_key(member), None)
        raw_classes.append(members)

    def rep_of(members):
        return min(members, key=state_key)

    raw_classes.sort(key=lambda ms: (len(ms), state_key(rep_of(ms))))

    library = canonical_entangled_states(model.n)
    classes: list[EntanglementClass] = []
    for members in raw_classes:
        rep = rep_of(members)
        matched = None
        for name in sorted(library):
            target = library[name]
            if any(np.abs(m - target).max() <= match_tol for m in members):
                matched = name
                break
        flag_source = library[matched] if matched is not None else rep
        classes.append(EntanglementClass(
            representative=rep, members=members, size=len(members),
            matched_name=matched, symmetric=is_symmetric(flag_source)))

    for name in library:
        if model.n in (4, 5, 6) and not any(c.matched_name == name for c in classes):
            raise InternalInconsistencyError(
                f"canonical state {name!r} was not found in any class")

    member_keys = [frozenset(state_key(m) for m in c.members) for c in classes]
    for ci, cls in enumerate(classes):
        tkey = state_key(composite.swap(cls.representative))
        for cj, keys in enumerate(member_keys):
            if tkey in keys:
                cls.swap_related_to = cj
                break
        if cls.swap_related_to is None:
            raise InternalInconsistencyError(
                "class transpose left the enumerated vertex set")
    return classes

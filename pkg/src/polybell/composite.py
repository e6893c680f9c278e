"""Bipartite states and effects of the maximal composition, as 3x3 matrices.

A normalized bipartite state is a real 3x3 matrix with bottom-right entry 1;
its probability on the product effect e (x) f is e^T Phi f.  Validity means
non-negative probability on every ray-extremal product effect.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from . import polygon
from .errors import InvalidParameterError
from .polygon import TOLERANCE, LocalTransform, PolygonModel, build_model

# Rounding used for dedup keys; computed vertices are separated by >> 1e-3.
KEY_DECIMALS = 7

RANK_TOLERANCE = 1e-9  # relative smallest-singular-value cutoff


def product_state(omega_a: np.ndarray, omega_b: np.ndarray) -> np.ndarray:
    return np.outer(np.asarray(omega_a, float), np.asarray(omega_b, float))


def product_effect(e: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.outer(np.asarray(e, float), np.asarray(f, float))


def joint_prob(effect, state) -> float:
    """Probability of ``effect`` on ``state``.

    ``effect`` is either a pair (e, f) of local vectors, evaluated as
    e^T Phi f, or a 3x3 matrix E, evaluated as Tr[E^T Phi].  The two forms
    agree when E = e f^T.
    """
    phi = np.asarray(state, dtype=float)
    if isinstance(effect, (tuple, list)) and len(effect) == 2:
        e, f = effect
        return float(np.asarray(e, float) @ phi @ np.asarray(f, float))
    eff = np.asarray(effect, dtype=float)
    return float(np.tensordot(eff, phi, axes=2))


@lru_cache(maxsize=None)
def product_effect_rows(model: PolygonModel) -> np.ndarray:
    """(n^2, 9) matrix whose row n*(i-1)+(j-1) is vec(e_i e_j^T)."""
    n = model.n
    es = model.ray_effects
    rows = (es[:, None, :, None] * es[None, :, None, :]).reshape(n * n, 9)
    rows.setflags(write=False)
    return rows


_NORMALIZATION_ROW = np.zeros(9)
_NORMALIZATION_ROW[8] = 1.0
_NORMALIZATION_ROW.setflags(write=False)


def normalization_row() -> np.ndarray:
    """vec(u u^T): picks out the bottom-right entry of a state."""
    return _NORMALIZATION_ROW


def positivity_margin(phi: np.ndarray, model: PolygonModel) -> float:
    """Smallest probability over all ray-extremal product effects."""
    vec = np.asarray(phi, float).reshape(9)
    return float((product_effect_rows(model) @ vec).min())


def is_valid_state(phi, model: PolygonModel, tol: float = TOLERANCE) -> bool:
    vec = np.asarray(phi, float).reshape(9)
    if abs(vec[8] - 1.0) > tol:
        return False
    return bool((product_effect_rows(model) @ vec >= -tol).all())


def apply_local(g, phi) -> np.ndarray:
    """Act with a local pair: (T_A (x) T_B) Phi = T_A Phi T_B^T.

    ``g`` is a pair of LocalTransform / 3x3 matrices, or any object carrying
    ``matrix_a`` and ``matrix_b`` attributes (a bipartite group element).
    """
    if hasattr(g, "matrix_a"):
        ta, tb = g.matrix_a, g.matrix_b
    else:
        ta, tb = g
    if isinstance(ta, LocalTransform):
        ta = ta.matrix
    if isinstance(tb, LocalTransform):
        tb = tb.matrix
    return np.asarray(ta, float) @ np.asarray(phi, float) @ np.asarray(tb, float).T


def swap(phi) -> np.ndarray:
    """Exchange the two sides: matrix transpose."""
    return np.asarray(phi, float).T.copy()


def is_symmetric(phi, tol: float = TOLERANCE) -> bool:
    m = np.asarray(phi, float)
    return bool(np.abs(m - m.T).max() <= tol)


def is_inner_product_state(phi, tol: float = TOLERANCE) -> bool:
    """Symmetric and e^T Phi e >= 0 for every e (positive semidefinite)."""
    m = np.asarray(phi, float)
    if not is_symmetric(m, tol):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (m + m.T)).min() >= -tol)


def state_key(phi, decimals: int = KEY_DECIMALS) -> tuple:
    """Dedup key: entries rounded to ``decimals`` places (no negative zero)."""
    vec = np.round(np.asarray(phi, float).reshape(9), decimals) + 0.0
    return tuple(vec.tolist())


def state_to_list(phi) -> list[float]:
    return [float(x) for x in np.asarray(phi, float).reshape(9)]


def state_from_list(values) -> np.ndarray:
    try:
        vec = np.asarray(values, dtype=float).reshape(3, 3)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(
            f"a state must be 9 numbers in row-major order: {exc}") from None
    if not np.isfinite(vec).all():
        raise InvalidParameterError("state entries must be finite")
    return vec


# ---------------------------------------------------------------------------
# Extremality certificate
# ---------------------------------------------------------------------------

def _rank(a: np.ndarray, rel_tol: float = RANK_TOLERANCE) -> int:
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int((sv > rel_tol * sv[0]).sum())


def active_facets(phi, model: PolygonModel, tol: float = TOLERANCE) -> list[int]:
    """1-based product-effect indices whose probability on ``phi`` vanishes."""
    vec = np.asarray(phi, float).reshape(9)
    vals = product_effect_rows(model) @ vec
    return [int(i) + 1 for i in np.nonzero(np.abs(vals) <= tol)[0]]


def facet_rank(phi, model: PolygonModel, tol: float = TOLERANCE) -> int:
    """Rank of the active facet equations together with normalization."""
    idx = [i - 1 for i in active_facets(phi, model, tol)]
    rows = [product_effect_rows(model)[idx]] if idx else []
    rows.append(normalization_row()[None, :])
    return _rank(np.vstack(rows))


def is_extreme_state(phi, model: PolygonModel, tol: float = TOLERANCE) -> bool:
    """Valid and pinned by 9 independent equalities (8 facets + normalization)."""
    return is_valid_state(phi, model, tol) and facet_rank(phi, model, tol) == 9


# ---------------------------------------------------------------------------
# Named entangled states
# ---------------------------------------------------------------------------

def maximally_entangled_state(n: int) -> np.ndarray:
    """Identity for odd n; rotation by pi/n for even n."""
    if n % 2:
        return np.eye(3)
    b = math.pi / n
    return np.array([
        [math.cos(b), math.sin(b), 0.0],
        [-math.sin(b), math.cos(b), 0.0],
        [0.0, 0.0, 1.0],
    ])


def pentagon_hardy_state() -> np.ndarray:
    """Representative of the second pentagon class (the Hardy class)."""
    r2 = 1.0 / math.cos(math.pi / 5.0)
    r = math.sqrt(r2)
    s = math.sin(math.pi / 5.0)
    c = math.cos(math.pi / 5.0)
    a = -(r2 ** 3) * s / (8.0 * (1.0 + r2))
    b = -(r ** 3) / (4.0 * s)
    return np.array([
        [-c, a, 0.0],
        [a, c, b],
        [0.0, b, 1.0],
    ])


def hexagon_class_states() -> dict[str, np.ndarray]:
    """The six hexagon class representatives, keyed I..VI (I is the rotation state)."""
    r = polygon.polygon_radius(6)
    r2, r3, r4 = r ** 2, r ** 3, r ** 4
    out = {
        "I": maximally_entangled_state(6),
        "II": np.array([
            [1 / (15 * r2), 7 / 10, 2 / (3 * r3)],
            [7 / 10, 1 / (5 * r2), 3 / (5 * r)],
            [2 / (3 * r3), 3 / (5 * r), 1.0],
        ]),
        "III": np.array([
            [-1 / (3 * r2), -1 / r4, 2 / (3 * r3)],
            [-1 / r4, 0.0, 1 / (2 * r)],
            [-2 / (3 * r3), -1 / (2 * r), 1.0],
        ]),
        "IV": np.array([
            [1 / (7 * r2), 9 / 14, 10 / (21 * r3)],
            [11 / 14, 1 / (7 * r2), 5 / (7 * r)],
            [6 / (7 * r3), 3 / (7 * r), 1.0],
        ]),
        "V": np.array([
            [1 / (7 * r2), 11 / 14, 6 / (7 * r3)],
            [9 / 14, 1 / (7 * r2), 3 / (7 * r)],
            [10 / (21 * r3), 5 / (7 * r), 1.0],
        ]),
        "VI": np.array([
            [-1 / (2 * r2), -1 / r4, 1 / (3 * r3)],
            [-1 / r4, 1 / (2 * r2), -1 / (2 * r)],
            [1 / (3 * r3), -1 / (2 * r), 1.0],
        ]),
    }
    return out


def canonical_entangled_states(n: int) -> dict[str, np.ndarray]:
    """Named entangled-state library for the n-gon composition."""
    if n == 5:
        return {"J": maximally_entangled_state(5), "H": pentagon_hardy_state()}
    if n == 6:
        return hexagon_class_states()
    return {"J": maximally_entangled_state(n)}


def canonical_state(n: int, name: str) -> np.ndarray:
    """Resolve a class name for the CLI; "J" is an alias of "I" when n=6."""
    lib = canonical_entangled_states(n)
    key = "I" if (n == 6 and name == "J") else name
    if key not in lib:
        raise InvalidParameterError(
            f"unknown state name {name!r} for n={n}; choose from {sorted(lib)}")
    return lib[key]


_CORNER_SLOTS = ((0, 2), (2, 0), (1, 2), (2, 1))


def hexagon_sign_audit(tol: float = TOLERANCE) -> dict:
    """Audit all corner-sign variants of the third hexagon class matrix.

    The bundled matrix carries opposite signs across the diagonal in its
    third row/column and is therefore not symmetric.  Flip each of the four
    corner entries through both signs and record which variants are valid
    extreme states and whether any symmetric variant survives.
    """
    model = build_model(6)
    base = hexagon_class_states()["III"]
    variants = []
    for signs in itertools.product((1, -1), repeat=4):
        m = base.copy()
        for sign, (a, b) in zip(signs, _CORNER_SLOTS):
            m[a, b] = sign * abs(m[a, b])
        variants.append({
            "signs": signs,
            "valid": is_valid_state(m, model, tol),
            "extreme": is_extreme_state(m, model, tol),
            "symmetric": is_symmetric(m, tol),
        })
    valid = [v["signs"] for v in variants if v["valid"] and v["extreme"]]
    symmetric_ok = any(
        v["symmetric"] for v in variants if v["valid"] and v["extreme"])
    note = (
        "hexagon class III: the bundled matrix is a valid extreme state but is "
        "not symmetric, and no corner-sign variant is both valid and symmetric; "
        "the only other valid variant is its transpose")
    return {
        "variants": variants,
        "valid_variants": valid,
        "symmetric_variant_exists": symmetric_ok,
        "note": note,
    }

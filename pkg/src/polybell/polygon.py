"""Single-system regular-polygon models: states, effects, reversible maps.

The n-gon model lives in R^3.  Pure states sit on a circle of radius
r_n = sqrt(sec(pi/n)) at height z = 1; effects are vectors paired with
states through the standard inner product.  Indices are 1-based and wrap
so that a multiple of n maps to n, never to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistencyError, InvalidParameterError, UnsupportedError

# Global comparison tolerance for matching, orthogonality and positivity.
TOLERANCE = 1e-9

_UNIT = np.array([0.0, 0.0, 1.0])
_NULL = np.array([0.0, 0.0, 0.0])
_UNIT.setflags(write=False)
_NULL.setflags(write=False)


def mod1(i: int, n: int) -> int:
    """Wrap ``i`` into ``1..n``; multiples of ``n`` return ``n``."""
    return (i - 1) % n + 1


def polygon_radius(n: int) -> float:
    return math.sqrt(1.0 / math.cos(math.pi / n))


@dataclass(frozen=True, eq=False)
class PolygonModel:
    """Immutable n-gon model: all fields are read-only arrays."""

    n: int
    radius: float
    states: np.ndarray       # (n, 3); row i-1 is the pure state with index i
    ray_effects: np.ndarray  # (n, 3); row i-1 is the ray-extremal effect e_i
    unit: np.ndarray
    null: np.ndarray
    parity: str              # "even" or "odd"

    @property
    def is_even(self) -> bool:
        return self.parity == "even"

    def state(self, i: int) -> np.ndarray:
        return self.states[mod1(i, self.n) - 1]

    def ray_effect(self, i: int) -> np.ndarray:
        return self.ray_effects[mod1(i, self.n) - 1]

    def bar_effect(self, i: int) -> np.ndarray:
        """Complement u - e_i of the i-th ray effect."""
        return self.unit - self.ray_effect(i)


def build_model(n: int) -> PolygonModel:
    """Construct the n-gon model for n >= 4.

    Pure states are (r cos(2*pi*i/n), r sin(2*pi*i/n), 1).  Ray effects are
    (r cos((2i-1)pi/n), r sin((2i-1)pi/n), 1)/2 for even n and
    (r cos(2*pi*i/n), r sin(2*pi*i/n), 1)/(1+r^2) for odd n.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidParameterError(f"n must be an integer, got {n!r}")
    if n < 4:
        raise InvalidParameterError(
            f"n must be >= 4 (n in 1..3 give simplicial state spaces), got {n}")
    r = polygon_radius(n)
    idx = np.arange(1, n + 1)
    ang = 2.0 * math.pi * idx / n
    states = np.column_stack([r * np.cos(ang), r * np.sin(ang), np.ones(n)])
    if n % 2 == 0:
        eang = (2 * idx - 1) * math.pi / n
        effects = 0.5 * np.column_stack(
            [r * np.cos(eang), r * np.sin(eang), np.ones(n)])
    else:
        effects = np.column_stack(
            [r * np.cos(ang), r * np.sin(ang), np.ones(n)]) / (1.0 + r * r)
    states.setflags(write=False)
    effects.setflags(write=False)
    return PolygonModel(
        n=n, radius=r, states=states, ray_effects=effects,
        unit=_UNIT, null=_NULL, parity="even" if n % 2 == 0 else "odd")


def effect_value(e: np.ndarray, omega: np.ndarray) -> float:
    """Outcome probability e(omega) = e . omega."""
    return float(np.dot(e, omega))


def complement(model: PolygonModel, e: np.ndarray) -> np.ndarray:
    """The complementary effect u - e."""
    return model.unit - np.asarray(e, dtype=float)


@dataclass(frozen=True, eq=False)
class LocalTransform:
    """Reversible single-system map: rotation (s=+1) or reflection (s=-1)."""

    k: int
    s: int
    matrix: np.ndarray


def transformation(model: PolygonModel, k: int, s: int) -> LocalTransform:
    """Rotation by 2*pi*k/n (s=+1) or reflection about angle pi*k/n (s=-1)."""
    if not 1 <= k <= model.n:
        raise InvalidParameterError(f"k must be in 1..{model.n}, got {k}")
    if s not in (1, -1):
        raise InvalidParameterError(f"s must be +1 or -1, got {s}")
    t = 2.0 * math.pi * k / model.n
    mat = np.array([
        [math.cos(t), -s * math.sin(t), 0.0],
        [math.sin(t), s * math.cos(t), 0.0],
        [0.0, 0.0, 1.0],
    ])
    mat.setflags(write=False)
    return LocalTransform(k=k, s=s, matrix=mat)


def transformations(model: PolygonModel) -> list[LocalTransform]:
    """All 2n reversible maps, rotations first, in index order."""
    out = [transformation(model, k, 1) for k in range(1, model.n + 1)]
    out += [transformation(model, k, -1) for k in range(1, model.n + 1)]
    return out


def _as_matrix(transform) -> np.ndarray:
    if isinstance(transform, LocalTransform):
        return transform.matrix
    return np.asarray(transform, dtype=float)


def _match_rows(targets: np.ndarray, images: np.ndarray, what: str) -> tuple[int, ...]:
    # nearest-row matching; distinct rows are separated by >> TOLERANCE
    perm = []
    for row in images:
        dist = np.abs(targets - row).max(axis=1)
        j = int(np.argmin(dist))
        if dist[j] > TOLERANCE:
            raise InternalInconsistencyError(
                f"no {what} within {TOLERANCE} of transformed vector (closest {dist[j]:.3e})")
        perm.append(j + 1)
    if len(set(perm)) != len(perm):
        raise InternalInconsistencyError(f"transformed {what}s do not permute the set")
    return tuple(perm)


def effect_permutation(model: PolygonModel, transform) -> tuple[int, ...]:
    """1-based permutation pi with T e_i = e_pi(i).

    The matrices act on effect vectors directly: every transformation matrix
    here equals its own inverse transpose, so state and effect actions agree.
    """
    mat = _as_matrix(transform)
    return _match_rows(model.ray_effects, model.ray_effects @ mat.T, "effect")


def state_permutation(model: PolygonModel, transform) -> tuple[int, ...]:
    """1-based permutation pi with T omega_i = omega_pi(i)."""
    mat = _as_matrix(transform)
    return _match_rows(model.states, model.states @ mat.T, "state")


def orthogonality_graph(model: PolygonModel, tol: float = TOLERANCE) -> dict:
    """Adjacency over the 2n extreme effects of an odd gon.

    Nodes are ("e", i) for ray effects and ("ebar", i) for complements;
    an edge joins two effects whose inner product vanishes within ``tol``.
    """
    if model.is_even:
        raise UnsupportedError("orthogonality graph is only defined for odd n")
    nodes = [("e", i) for i in range(1, model.n + 1)]
    nodes += [("ebar", i) for i in range(1, model.n + 1)]
    vectors = [model.ray_effect(i) for i in range(1, model.n + 1)]
    vectors += [model.bar_effect(i) for i in range(1, model.n + 1)]
    graph = {node: [] for node in nodes}
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            if abs(np.dot(vectors[a], vectors[b])) <= tol:
                graph[nodes[a]].append(nodes[b])
                graph[nodes[b]].append(nodes[a])
    return {node: tuple(sorted(neigh)) for node, neigh in graph.items()}

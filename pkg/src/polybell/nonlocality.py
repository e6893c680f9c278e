"""Behaviours, Hardy-type arguments, and CHSH values for bipartite states.

Measurements are dichotomic and built from extreme effects: every ray
effect paired with its complement, in both outcome orientations.  Scans are
exhaustive over ordered 4-tuples (two measurements per side) from that set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistencyError, InvalidParameterError
from .polygon import PolygonModel

HARDY_TOLERANCE = 1e-9  # zero-constraint and strict-positivity threshold
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class DichotomicMeasurement:
    """Two-outcome measurement; ``label`` is (effect index, orientation).

    Orientation +1 assigns the positive outcome to the ray effect, -1 to its
    complement.
    """

    plus: np.ndarray
    minus: np.ndarray
    label: tuple[int, int]


def measurement_set(model: PolygonModel) -> list[DichotomicMeasurement]:
    """The 2n extremal dichotomic measurements (both orientations of each pair)."""
    out = []
    for orientation in (1, -1):
        for i in range(1, model.n + 1):
            e = model.ray_effect(i)
            ebar = model.unit - e
            plus, minus = (e, ebar) if orientation == 1 else (ebar, e)
            out.append(DichotomicMeasurement(plus=plus, minus=minus,
                                             label=(i, orientation)))
    return out


def measurement_by_label(model: PolygonModel, label) -> DichotomicMeasurement:
    i, orientation = label
    if not 1 <= i <= model.n or orientation not in (1, -1):
        raise InvalidParameterError(f"bad measurement label {label!r}")
    e = model.ray_effect(i)
    ebar = model.unit - e
    plus, minus = (e, ebar) if orientation == 1 else (ebar, e)
    return DichotomicMeasurement(plus=plus, minus=minus, label=(i, orientation))


def measurement_from_ray_pair(model: PolygonModel, plus_index: int,
                              minus_index: int) -> DichotomicMeasurement:
    """Outcome pair built from two ray effects named by index.

    The pair need not sum to the unit effect; only the four Hardy cells of a
    behaviour built from it are meaningful in that case.
    """
    return DichotomicMeasurement(plus=model.ray_effect(plus_index),
                                 minus=model.ray_effect(minus_index),
                                 label=(plus_index, minus_index))


@dataclass(frozen=True, eq=False)
class Behaviour:
    """Joint table p(a,b|x,y) for two dichotomic measurements per side.

    ``table[x, y, a, b]`` uses 0 for the + outcome and 1 for the - outcome.
    """

    table: np.ndarray  # (2, 2, 2, 2)
    labels: tuple      # (A1, A2, B1, B2) measurement labels

    def block(self, x: int, y: int) -> np.ndarray:
        return self.table[x - 1, y - 1]

    def prob(self, a: str, b: str, x: int, y: int) -> float:
        return float(self.table[x - 1, y - 1, 0 if a == "+" else 1,
                                0 if b == "+" else 1])

    def as_rows(self) -> np.ndarray:
        """4x4 layout: rows (x,y) in order 11,12,21,22; columns ++, +-, -+, --."""
        return self.table.reshape(4, 4)

    def correlator(self, x: int, y: int) -> float:
        block = self.block(x, y)
        return float(block[0, 0] - block[0, 1] - block[1, 0] + block[1, 1])


def behaviour(phi, m_a1: DichotomicMeasurement, m_a2: DichotomicMeasurement,
              n_b1: DichotomicMeasurement, n_b2: DichotomicMeasurement) -> Behaviour:
    phi = np.asarray(phi, dtype=float)
    alice = np.array([[m_a1.plus, m_a1.minus], [m_a2.plus, m_a2.minus]])
    bob = np.array([[n_b1.plus, n_b1.minus], [n_b2.plus, n_b2.minus]])
    table = np.einsum("xai,ij,ybj->xyab", alice, phi, bob)
    return Behaviour(table=table,
                     labels=(m_a1.label, m_a2.label, n_b1.label, n_b2.label))


def normalization_defect(b: Behaviour) -> float:
    return float(np.abs(b.table.sum(axis=(2, 3)) - 1.0).max())


def no_signaling_defect(b: Behaviour) -> float:
    """Largest marginal shift of either side when the other side's input flips."""
    alice = b.table.sum(axis=3)  # (x, y, a)
    bob = b.table.sum(axis=2)    # (x, y, b)
    d_alice = np.abs(alice[:, 0, :] - alice[:, 1, :]).max()
    d_bob = np.abs(bob[0, :, :] - bob[1, :, :]).max()
    return float(max(d_alice, d_bob))


def hardy_check(b: Behaviour, tol: float = HARDY_TOLERANCE):
    """Success probability if the three zero constraints hold, else None.

    Constraints: p(+,+|1,2) = p(+,+|2,1) = p(-,-|2,2) = 0 within ``tol`` and
    p(+,+|1,1) > tol.
    """
    z1 = b.prob("+", "+", 1, 2)
    z2 = b.prob("+", "+", 2, 1)
    z3 = b.prob("-", "-", 2, 2)
    if abs(z1) > tol or abs(z2) > tol or abs(z3) > tol:
        return None
    success = b.prob("+", "+", 1, 1)
    return success if success > tol else None


@dataclass(frozen=True, eq=False)
class HardyWitness:
    labels: tuple            # (A1, A2, B1, B2)
    success: float
    residuals: tuple[float, float, float]
    ties: tuple              # all label 4-tuples within TIE_TOLERANCE of the max


def _effect_stacks(model: PolygonModel):
    ms = measurement_set(model)
    plus = np.array([m.plus for m in ms])
    minus = np.array([m.minus for m in ms])
    labels = [m.label for m in ms]
    return ms, plus, minus, labels


def hardy_scan(phi, model: PolygonModel, tol: float = HARDY_TOLERANCE):
    """Exhaustive Hardy scan over all ordered measurement 4-tuples.

    Returns the maximal-success HardyWitness, or None when no tuple passes
    the three zero constraints with strictly positive success.
    """
    phi = np.asarray(phi, dtype=float)
    _, plus, minus, labels = _effect_stacks(model)
    ppp = plus @ phi @ plus.T
    pmm = minus @ phi @ minus.T
    k = len(labels)
    z1 = np.abs(ppp) <= tol  # indexed [a1, b2]
    z2 = np.abs(ppp) <= tol  # indexed [a2, b1]
    z3 = np.abs(pmm) <= tol  # indexed [a2, b2]
    passing = (z1[:, None, None, :] & z2[None, :, :, None] & z3[None, :, None, :])
    success = np.broadcast_to(ppp[:, None, :, None], (k, k, k, k))
    values = np.where(passing, success, -np.inf)
    best = float(values.max())
    if best <= tol:
        return None
    ties = sorted(
        tuple(labels[i] for i in idx)
        for idx in np.argwhere(values >= best - TIE_TOLERANCE))
    a1, a2, b1, b2 = [labels.index(lbl) for lbl in ties[0]]
    residuals = (float(ppp[a1, b2]), float(ppp[a2, b1]), float(pmm[a2, b2]))
    return HardyWitness(labels=ties[0], success=best, residuals=residuals,
                        ties=tuple(ties))


def correlator_table(phi, model: PolygonModel) -> np.ndarray:
    """(2n, 2n) table of <M_x N_y> over the full measurement set."""
    phi = np.asarray(phi, dtype=float)
    _, plus, minus, _ = _effect_stacks(model)
    return (plus @ phi @ plus.T - plus @ phi @ minus.T
            - minus @ phi @ plus.T + minus @ phi @ minus.T)


def chsh_combinations(table: np.ndarray) -> np.ndarray:
    """All ordered-tuple CHSH values <11>+<12>+<21>-<22> from a correlator table."""
    return (table[:, None, :, None] + table[:, None, None, :]
            + table[None, :, :, None] - table[None, :, None, :])


def chsh_value(b: Behaviour) -> float:
    return (b.correlator(1, 1) + b.correlator(1, 2)
            + b.correlator(2, 1) - b.correlator(2, 2))


@dataclass(frozen=True, eq=False)
class ChshResult:
    value: float
    labels: tuple
    ties: tuple


def chsh_scan(phi, model: PolygonModel) -> ChshResult:
    """Maximum |CHSH| over all ordered measurement 4-tuples, with ties."""
    _, _, _, labels = _effect_stacks(model)
    values = np.abs(chsh_combinations(correlator_table(phi, model)))
    best = float(values.max())
    ties = sorted(
        tuple(labels[i] for i in idx)
        for idx in np.argwhere(values >= best - TIE_TOLERANCE))
    return ChshResult(value=best, labels=ties[0], ties=tuple(ties))


def chsh_max(phi, model: PolygonModel) -> float:
    return chsh_scan(phi, model).value


def quantum_reference_constants() -> dict[str, float]:
    """Reference bounds for report annotation."""
    return {
        "hardy_quantum_max": (5.0 * math.sqrt(5.0) - 11.0) / 2.0,
        "tsirelson": 2.0 * math.sqrt(2.0),
    }

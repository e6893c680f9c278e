"""Mixed-state phenomena: noisy Hardy witnesses and entanglement thresholds.

Two noise families are analyzed: mixing an entangled state with a pure
product state (Hardy witnesses survive, scaled by the weight) and mixing
with the maximally mixed state (where entanglement and CHSH nonlocality
set in at different weights).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .composite import joint_prob, maximally_entangled_state, pentagon_hardy_state, product_state
from .errors import InternalInconsistencyError, InvalidParameterError, UnsupportedError
from .nonlocality import (
    HARDY_TOLERANCE, behaviour, chsh_combinations, chsh_max, correlator_table,
    hardy_check, hardy_scan, measurement_by_label,
)
from .polygon import TOLERANCE, PolygonModel, build_model


def maximally_mixed() -> np.ndarray:
    """Product of the two single-system centroids: 1 in the bottom-right corner."""
    out = np.zeros((3, 3))
    out[2, 2] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class NoisyState:
    base: np.ndarray
    noise: np.ndarray
    weight: float

    @property
    def mixed(self) -> np.ndarray:
        return self.weight * self.base + (1.0 - self.weight) * self.noise


def mixed_state(base, noise, weight: float) -> NoisyState:
    if not 0.0 <= weight <= 1.0:
        raise InvalidParameterError(f"weight must lie in [0, 1], got {weight}")
    return NoisyState(base=np.asarray(base, float),
                      noise=np.asarray(noise, float), weight=float(weight))


def werner_state(model: PolygonModel, p: float) -> NoisyState:
    """Rotation-type entangled state mixed with the maximally mixed state."""
    return mixed_state(maximally_entangled_state(model.n), maximally_mixed(), p)


def entangled_effect(model: PolygonModel) -> tuple[np.ndarray, np.ndarray]:
    """The entangled effect pair (E, u(x)u - E) of the composition."""
    n = model.n
    if n % 2:
        e = np.eye(3) / (1.0 + model.radius ** 2)
    else:
        b = math.pi / n
        e = 0.5 * np.array([
            [-math.cos(b), -math.sin(b), 0.0],
            [math.sin(b), -math.cos(b), 0.0],
            [0.0, 0.0, 1.0],
        ])
    return e, maximally_mixed() - e


def witness_entanglement(phi, model: PolygonModel, tol: float = TOLERANCE) -> bool:
    """True when either entangled effect goes negative on ``phi``.

    Sufficient but not necessary: product states give non-negative values on
    every valid effect, so a negative value certifies entanglement.
    """
    e, ebar = entangled_effect(model)
    return joint_prob(e, phi) < -tol or joint_prob(ebar, phi) < -tol


@dataclass(frozen=True, eq=False)
class ThresholdReport:
    n: int
    p_entangled: float
    p_nonlocal: float
    gap_exists: bool
    b_max: float


def noise_thresholds(model: PolygonModel, b_max: float | None = None) -> ThresholdReport:
    """Critical weights of the maximally-mixed noise family.

    ``p_entangled`` is where the entanglement witness turns negative (the
    witness value is linear in the weight).  ``p_nonlocal`` is where the
    maximal CHSH value crosses the local bound 2: per measurement tuple the
    CHSH value is linear in the weight, so the threshold is the smallest
    crossing among tuples that are nonlocal at weight 1.  For even gons all
    correlators vanish on the noise and this reduces to 2 / b_max.
    """
    phi = maximally_entangled_state(model.n)
    noise = maximally_mixed()

    b_signal = chsh_combinations(correlator_table(phi, model))
    if b_max is None:
        b_max = float(np.abs(b_signal).max())
    if b_max <= 0:
        raise InvalidParameterError(f"b_max must be positive, got {b_max}")
    b_noise = chsh_combinations(correlator_table(noise, model))
    nonlocal_at_one = b_signal > 2.0 + 1e-12
    if not nonlocal_at_one.any():
        raise InternalInconsistencyError("no measurement tuple is nonlocal at weight 1")
    crossings = (2.0 - b_noise[nonlocal_at_one]) / (
        b_signal[nonlocal_at_one] - b_noise[nonlocal_at_one])
    p_nonlocal = float(crossings.min())

    candidates = []
    for witness in entangled_effect(model):
        at_one = joint_prob(witness, phi)
        at_zero = joint_prob(witness, noise)
        if at_one < -TOLERANCE <= at_zero:
            candidates.append(at_zero / (at_zero - at_one))
    if not candidates:
        raise InternalInconsistencyError("neither entangled effect flips sign")
    p_entangled = float(min(candidates))

    return ThresholdReport(n=model.n, p_entangled=p_entangled,
                           p_nonlocal=p_nonlocal,
                           gap_exists=p_entangled < p_nonlocal, b_max=b_max)


def bisect_entanglement_threshold(model: PolygonModel, iterations: int = 40) -> float:
    """Direct bisection of the witness flip along the noise family."""
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if witness_entanglement(werner_state(model, mid).mixed, model):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def bisect_nonlocality_threshold(model: PolygonModel, iterations: int = 40) -> float:
    """Direct bisection of the CHSH crossing along the noise family."""
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if chsh_max(werner_state(model, mid).mixed, model) > 2.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Hardy witnesses for mixed states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MixedHardyWitness:
    state: NoisyState
    labels: tuple
    success: float
    residuals: tuple[float, float, float]
    noise_indices: tuple[int, int]


def _check_epsilon(eps: float) -> float:
    if not 0.0 < eps <= 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1], got {eps}")
    return float(eps)


def _witness_from_labels(model, noisy: NoisyState, labels, noise_indices):
    measurements = [measurement_by_label(model, lbl) for lbl in labels]
    b = behaviour(noisy.mixed, *measurements)
    success = hardy_check(b)
    if success is None:
        raise InternalInconsistencyError(
            "mixed-state construction failed its zero constraints")
    residuals = (b.prob("+", "+", 1, 2), b.prob("+", "+", 2, 1),
                 b.prob("-", "-", 2, 2))
    return MixedHardyWitness(state=noisy, labels=tuple(labels), success=success,
                             residuals=residuals, noise_indices=noise_indices)


def hardy_mixed_even(model: PolygonModel, eps: float) -> MixedHardyWitness:
    """Noisy Hardy witness for even gons: success scales linearly with eps.

    The pure part uses the optimal measurement tuple of the rotation-type
    entangled state; the product noise is found by scanning the n x n grid
    for a pure product state on which all four Hardy cells vanish, so the
    noise contributes nothing to the argument.
    """
    if model.n % 2:
        raise UnsupportedError("the even-gon construction needs an even n")
    eps = _check_epsilon(eps)
    phi = maximally_entangled_state(model.n)
    pure = hardy_scan(phi, model)
    if pure is None:
        raise InternalInconsistencyError("even-gon scan lost its Hardy witness")
    measurements = [measurement_by_label(model, lbl) for lbl in pure.labels]
    noise_indices = None
    for r in range(1, model.n + 1):
        for s in range(1, model.n + 1):
            product = product_state(model.state(r), model.state(s))
            cells = behaviour(product, *measurements)
            if (abs(cells.prob("+", "+", 1, 1)) <= HARDY_TOLERANCE
                    and abs(cells.prob("+", "+", 1, 2)) <= HARDY_TOLERANCE
                    and abs(cells.prob("+", "+", 2, 1)) <= HARDY_TOLERANCE
                    and abs(cells.prob("-", "-", 2, 2)) <= HARDY_TOLERANCE):
                noise_indices = (r, s)
                break
        if noise_indices:
            break
    if noise_indices is None:
        raise InternalInconsistencyError("no product state clears the Hardy cells")
    noise = product_state(model.state(noise_indices[0]), model.state(noise_indices[1]))
    noisy = mixed_state(phi, noise, eps)
    return _witness_from_labels(model, noisy, pure.labels, noise_indices)


# Product choices covered by the pentagon construction, with the measurement
# labels ((A1, A2, B1, B2)) that clear all four Hardy cells on the noise.
_PENTAGON_BASE = ((1, 1), (2, -1), (1, 1), (2, -1))
_PENTAGON_CASES = {
    (3, 4): _PENTAGON_BASE,
    (4, 3): _PENTAGON_BASE,
    (4, 4): _PENTAGON_BASE,
    (3, 5): ((1, 1), (5, 1), (1, 1), (2, -1)),
    (5, 3): ((1, 1), (2, -1), (1, 1), (5, 1)),  # sides-exchanged mirror of (3, 5)
}


def hardy_mixed_pentagon(eps: float, product_choice) -> MixedHardyWitness:
    """Noisy Hardy witness for the pentagon's second entangled class.

    Only five product-noise choices admit measurements clearing all four
    Hardy cells; any other choice is rejected.
    """
    eps = _check_epsilon(eps)
    choice = tuple(int(x) for x in product_choice)
    if choice not in _PENTAGON_CASES:
        raise UnsupportedError(
            f"product choice {choice} is not covered; "
            f"supported: {sorted(_PENTAGON_CASES)}")
    model = build_model(5)
    noise = product_state(model.state(choice[0]), model.state(choice[1]))
    noisy = mixed_state(pentagon_hardy_state(), noise, eps)
    return _witness_from_labels(model, noisy, _PENTAGON_CASES[choice], choice)

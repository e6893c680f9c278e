"""Regular-polygon toy theories: composites, entanglement classes, nonlocality."""

from .composite import (
    canonical_entangled_states,
    is_valid_state,
    joint_prob,
    maximally_entangled_state,
    pentagon_hardy_state,
    product_state,
)
from .errors import InternalInconsistencyError, InvalidParameterError, UnsupportedError
from .mixtures import noise_thresholds
from .nonlocality import chsh_max, hardy_scan, measurement_set
from .polygon import PolygonModel, build_model
from .symmetry import burnside_orbit_count
from .vertices import classify_entangled, enumerate_extreme_states

__all__ = [
    "InternalInconsistencyError",
    "InvalidParameterError",
    "PolygonModel",
    "UnsupportedError",
    "build_model",
    "burnside_orbit_count",
    "canonical_entangled_states",
    "chsh_max",
    "classify_entangled",
    "enumerate_extreme_states",
    "hardy_scan",
    "is_valid_state",
    "joint_prob",
    "maximally_entangled_state",
    "measurement_set",
    "noise_thresholds",
    "pentagon_hardy_state",
    "product_state",
]

__version__ = "0.1.0"

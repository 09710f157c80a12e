"""Decentralized graph-policy execution over simulated and real datagram links."""

__version__ = "0.1.0"

from .errors import (
    ShapeError,
    SwarmMeshError,
    TransportError,
    ValidationError,
    WeightFormatError,
)
from .policy import (
    Message,
    PolicyWeights,
    evaluate_centralized,
    evaluate_local,
    load_weights,
    random_weights,
    save_weights,
)
from .world import CommConfig, EpisodeStatus, ScenarioSpec, WorldConfig

__all__ = [
    "__version__",
    "SwarmMeshError",
    "ShapeError",
    "WeightFormatError",
    "ValidationError",
    "TransportError",
    "Message",
    "PolicyWeights",
    "evaluate_centralized",
    "evaluate_local",
    "load_weights",
    "random_weights",
    "save_weights",
    "CommConfig",
    "EpisodeStatus",
    "ScenarioSpec",
    "WorldConfig",
]

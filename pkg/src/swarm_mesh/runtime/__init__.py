from .cache import MessageCache
from .episode import run_episode, nominal_offered_load
from .experiment import (
    ExperimentPlan,
    HeartbeatFault,
    load_plan,
    plan_from_json,
    plan_to_json,
    run_experiment,
)
from .modes import DEFAULT_PRESETS, MODE_NAMES, ModeConfig
from .server import ServerState, StateServer
from .trace import EpisodeTrace, make_header

__all__ = [
    "MessageCache",
    "run_episode",
    "nominal_offered_load",
    "ExperimentPlan",
    "HeartbeatFault",
    "load_plan",
    "plan_from_json",
    "plan_to_json",
    "run_experiment",
    "DEFAULT_PRESETS",
    "MODE_NAMES",
    "ModeConfig",
    "ServerState",
    "StateServer",
    "EpisodeTrace",
    "make_header",
]

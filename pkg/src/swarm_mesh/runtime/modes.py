"""Execution-mode presets: who evaluates the policy, over which network."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError
from ..transport import Preset, load_preset

MODE_NAMES = ("centralized", "offboard", "onboard-infra", "onboard-adhoc")

DEFAULT_PRESETS = {
    "centralized": "ideal",
    "offboard": "ideal",
    "onboard-infra": "infra-unicast-r1",
    "onboard-adhoc": "adhoc-multicast-r1",
}


@dataclass(frozen=True)
class ModeConfig:
    """An execution mode bound to a transport preset.

    centralized evaluates the whole team synchronously on one evaluator (the
    preset only contributes an actuation-delay distribution); the other modes
    run one evaluator per agent over the preset's network.  aligned makes the
    virtual clock run publish/deliver/evaluate as three phases per tick,
    which with an ideal preset reproduces centralized actions exactly.
    """

    name: str
    preset: Preset
    aligned: bool = True
    staleness: float | None = None  # None -> 2 * dt

    def __post_init__(self):
        if self.name not in MODE_NAMES:
            raise ValidationError(
                f"unknown mode {self.name!r}; expected one of {MODE_NAMES}"
            )
        if (
            self.name == "centralized"
            and self.preset.mode.kind == "multicast"
            and self.preset.name != "ideal"
        ):
            raise ValidationError(
                "centralized mode has no inter-agent broadcast; "
                f"preset {self.preset.name!r} is inconsistent with it"
            )

    @property
    def decentralized(self) -> bool:
        return self.name != "centralized"

    @classmethod
    def default(cls, name: str, preset_name: str | None = None, **kw) -> "ModeConfig":
        if name not in MODE_NAMES:
            raise ValidationError(
                f"unknown mode {name!r}; expected one of {MODE_NAMES}"
            )
        preset = load_preset(preset_name or DEFAULT_PRESETS[name])
        return cls(name=name, preset=preset, **kw)

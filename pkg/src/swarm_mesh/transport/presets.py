"""Shipped network presets (config files bundled with the package)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..errors import ValidationError
from .model import ContentionPoint, EmuNetModel, TransportMode

PRESET_NAMES = ("ideal", "adhoc-multicast-r1", "infra-unicast-r1", "unicast-default-r7")


@dataclass(frozen=True)
class Preset:
    name: str
    mode: TransportMode
    model: EmuNetModel

    def with_seed(self, seed: int) -> "Preset":
        return Preset(self.name, self.mode, EmuNetModel(
            delay_median_ms=self.model.delay_median_ms,
            delay_sigma=self.model.delay_sigma,
            loss=self.model.loss,
            contention=self.model.contention,
            seed=seed,
            hops=self.model.hops,
            extra_load=self.model.extra_load,
            retry_gap_ms=self.model.retry_gap_ms,
        ))


def _parse(doc: dict) -> Preset:
    mode = TransportMode(
        kind=doc["mode"]["kind"],
        retry_limit=int(doc["mode"]["retry_limit"]),
        positive_acks=bool(doc["mode"].get("positive_acks", False)),
    )
    m = doc["model"]
    model = EmuNetModel(
        delay_median_ms=float(m["delay_median_ms"]),
        delay_sigma=float(m["delay_sigma"]),
        loss=float(m["loss"]),
        contention=tuple(ContentionPoint(*pt) for pt in m.get("contention", [])),
        hops=int(m.get("hops", 1)),
        extra_load=float(m.get("extra_load", 0.0)),
        retry_gap_ms=float(m.get("retry_gap_ms", 2.0)),
    )
    return Preset(name=doc["name"], mode=mode, model=model)


def load_preset(name: str) -> Preset:
    if name not in PRESET_NAMES:
        raise ValidationError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    ref = resources.files("swarm_mesh.transport") / "presets" / f"{name}.json"
    return _parse(json.loads(ref.read_text()))


def load_preset_file(path) -> Preset:
    with open(path) as fh:
        return _parse(json.load(fh))

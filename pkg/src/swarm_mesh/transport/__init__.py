from .model import (
    ContentionPoint,
    Datagram,
    DeliveryRecord,
    EmuNetModel,
    TransportMode,
    effective_delivery_prob,
    fanout_count,
)
from .emu import EmuNetwork, emu_send, physical_transmissions
from .presets import PRESET_NAMES, Preset, load_preset, load_preset_file

__all__ = [
    "ContentionPoint",
    "Datagram",
    "DeliveryRecord",
    "EmuNetModel",
    "TransportMode",
    "effective_delivery_prob",
    "fanout_count",
    "EmuNetwork",
    "emu_send",
    "physical_transmissions",
    "PRESET_NAMES",
    "Preset",
    "load_preset",
    "load_preset_file",
]

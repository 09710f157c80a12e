"""Transport modes, the emulated-network model, and analytic helpers."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ValidationError

MAX_RETRY_LIMIT = 7


@dataclass(frozen=True)
class TransportMode:
    """Unicast (per-subscriber sends) or multicast (one broadcast per message).

    retry_limit caps link-layer retransmissions: per subscriber for unicast,
    for the single shared broadcast in multicast (ack-driven re-broadcast).
    positive_acks adds subscriber->publisher ack traffic on delivery.
    """

    kind: str  # "unicast" | "multicast"
    retry_limit: int = 0
    positive_acks: bool = False

    def __post_init__(self):
        if self.kind not in ("unicast", "multicast"):
            raise ValidationError(f"unknown transport kind {self.kind!r}")
        if not (0 <= self.retry_limit <= MAX_RETRY_LIMIT):
            raise ValidationError(
                f"retry_limit must be in 0..{MAX_RETRY_LIMIT}, got {self.retry_limit}"
            )

    @property
    def max_attempts(self) -> int:
        return self.retry_limit + 1


def fanout_count(mode: TransportMode, subscribers: int) -> int:
    """Physical first-attempt transmissions needed for one published message."""
    if subscribers < 0:
        raise ValidationError("subscriber count cannot be negative")
    if subscribers == 0:
        return 0
    return subscribers if mode.kind == "unicast" else 1


def effective_delivery_prob(loss_p: float, retry_limit: int) -> float:
    """Delivery probability with ack-driven retries: 1 - p^(retries+1)."""
    if not (0.0 <= loss_p <= 1.0):
        raise ValidationError("loss probability must be in [0, 1]")
    if retry_limit < 0:
        raise ValidationError("retry_limit cannot be negative")
    return 1.0 - loss_p ** (retry_limit + 1)


@dataclass(frozen=True)
class ContentionPoint:
    offered_load: float  # msg/s presented to the medium
    loss_mult: float
    delay_mult: float


@dataclass(frozen=True)
class EmuNetModel:
    """Seeded statistical model of one wireless hop (or two, for infra mode).

    Delay is lognormal (median ms, log-space sigma); loss is a per-attempt
    probability; both are scaled by contention multipliers interpolated over
    aggregate offered load.  hops=2 models sender->AP->receiver with
    independent samples per hop; extra_load is standing background traffic
    (e.g. the location system) added to the offered load.
    """

    delay_median_ms: float = 0.0
    delay_sigma: float = 0.5
    loss: float = 0.0
    contention: tuple[ContentionPoint, ...] = ()
    seed: int = 0
    hops: int = 1
    extra_load: float = 0.0
    retry_gap_ms: float = 2.0

    def __post_init__(self):
        if not (0.0 <= self.loss <= 1.0):
            raise ValidationError("loss must be in [0, 1]")
        if self.hops not in (1, 2):
            raise ValidationError("hops must be 1 or 2")
        pts = tuple(self.contention)
        loads = [p.offered_load for p in pts]
        if loads != sorted(loads):
            raise ValidationError("contention table must be sorted by offered load")
        for a, b in zip(pts, pts[1:]):
            if b.loss_mult < a.loss_mult or b.delay_mult < a.delay_mult:
                raise ValidationError("contention multipliers must be non-decreasing")
        object.__setattr__(self, "contention", pts)

    def multipliers(self, offered_load: float) -> tuple[float, float]:
        """(loss_mult, delay_mult) at the given load, linearly interpolated."""
        load = max(0.0, offered_load) + self.extra_load
        pts = self.contention
        if not pts:
            return 1.0, 1.0
        if load <= pts[0].offered_load:
            return pts[0].loss_mult, pts[0].delay_mult
        if load >= pts[-1].offered_load:
            return pts[-1].loss_mult, pts[-1].delay_mult
        for a, b in zip(pts, pts[1:]):
            if a.offered_load <= load <= b.offered_load:
                span = b.offered_load - a.offered_load
                f = 0.0 if span == 0 else (load - a.offered_load) / span
                return (
                    a.loss_mult + f * (b.loss_mult - a.loss_mult),
                    a.delay_mult + f * (b.delay_mult - a.delay_mult),
                )
        raise AssertionError("unreachable")

    def loss_at(self, offered_load: float) -> float:
        lm, _ = self.multipliers(offered_load)
        return min(1.0, self.loss * lm)


@dataclass(frozen=True)
class Datagram:
    topic: str
    sender: int
    sequence: int
    send_time: float  # s
    payload: object


@dataclass
class DeliveryRecord:
    sequence: int
    sender: int
    receiver: int
    sent_at: float
    delivered_at: float | None  # None = lost
    attempts: int

    @property
    def delivered(self) -> bool:
        return self.delivered_at is not None

    @property
    def delay(self) -> float | None:
        if self.delivered_at is None:
            return None
        return self.delivered_at - self.sent_at

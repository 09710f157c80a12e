"""Seeded emulated datagram network.

Every random draw is addressed by (seed, sender, sequence, receiver, attempt,
hop), so a given configuration always produces the identical stream of
delivery records regardless of call order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .. import rng
from ..errors import TransportError, ValidationError
from .model import Datagram, DeliveryRecord, EmuNetModel, TransportMode


def _attempt_outcome(model, mode, dg, receiver, attempt, loss_p, delay_mult):
    """(success, delay_seconds) for one physical attempt toward one receiver."""
    delay = 0.0
    for hop in range(model.hops):
        u = rng.uniform(model.seed, "loss", dg.sender, dg.sequence, receiver, attempt, hop)
        if u < loss_p:
            return False, 0.0
        delay += rng.lognormal(
            model.delay_median_ms * delay_mult,
            model.delay_sigma,
            model.seed, "delay", dg.sender, dg.sequence, receiver, attempt, hop,
        )
    return True, delay / 1000.0


def emu_send(
    model: EmuNetModel,
    mode: TransportMode,
    datagram: Datagram,
    subscribers,
    offered_load: float,
    now: float,
) -> list[DeliveryRecord]:
    """Deliver one published message to its subscribers.

    Unicast runs an independent attempt chain per subscriber; multicast makes
    shared broadcast attempts, re-broadcasting (ack-driven) only while some
    subscriber is still missing and retries remain.
    """
    if offered_load < 0:
        raise ValidationError("offered load cannot be negative")
    loss_mult, delay_mult = model.multipliers(offered_load)
    loss_p = min(1.0, model.loss * loss_mult)
    gap = model.retry_gap_ms / 1000.0
    records = []

    if mode.kind == "unicast":
        for receiver in subscribers:
            delivered = None
            attempts = 0
            for attempt in range(1, mode.max_attempts + 1):
                attempts = attempt
                ok, delay = _attempt_outcome(
                    model, mode, datagram, receiver, attempt, loss_p, delay_mult
                )
                if ok:
                    delivered = now + (attempt - 1) * gap + delay
                    break
            records.append(
                DeliveryRecord(
                    sequence=datagram.sequence,
                    sender=datagram.sender,
                    receiver=receiver,
                    sent_at=now,
                    delivered_at=delivered,
                    attempts=attempts,
                )
            )
        return records

    # multicast: one shared broadcast per attempt
    missing = list(subscribers)
    got: dict = {}
    attempts_made = 0
    for attempt in range(1, mode.max_attempts + 1):
        if not missing:
            break
        attempts_made = attempt
        still = []
        for receiver in missing:
            ok, delay = _attempt_outcome(
                model, mode, datagram, receiver, attempt, loss_p, delay_mult
            )
            if ok:
                got[receiver] = (now + (attempt - 1) * gap + delay, attempt)
            else:
                still.append(receiver)
        missing = still
    for receiver in subscribers:
        if receiver in got:
            delivered_at, attempt = got[receiver]
        else:
            delivered_at, attempt = None, attempts_made
        records.append(
            DeliveryRecord(
                sequence=datagram.sequence,
                sender=datagram.sender,
                receiver=receiver,
                sent_at=now,
                delivered_at=delivered_at,
                attempts=attempt,
            )
        )
    return records


def physical_transmissions(mode: TransportMode, records) -> int:
    """Physical sends implied by one message's delivery records."""
    if not records:
        return 0
    if mode.kind == "unicast":
        return sum(r.attempts for r in records)
    return max(r.attempts for r in records)


class EmuEndpoint:
    def __init__(self, network: "EmuNetwork", node_id: int):
        self.network = network
        self.node_id = node_id

    def publish(self, topic: str, payload, now: float) -> int:
        return self.network.publish(self, topic, payload, now)

    def poll(self, now: float):
        return self.network.poll(self, now)

    def subscribe(self, topic: str):
        self.network.subscribe(self, topic)


class EmuNetwork:
    """Pub/sub facade over the emulated medium with a shared logical clock."""

    def __init__(self, model: EmuNetModel, mode: TransportMode, offered_load: float = 0.0):
        self.model = model
        self.mode = mode
        self.offered_load = offered_load
        self._endpoints: dict[int, EmuEndpoint] = {}
        self._subs: dict[str, set[int]] = {}
        self._seq: dict[tuple[int, str], int] = {}
        self._inbox: dict[int, list] = {}
        self.delivery_log: list[DeliveryRecord] = []
        self.physical_sends = 0
        self._closed = False

    def endpoint(self, node_id: int) -> EmuEndpoint:
        if node_id not in self._endpoints:
            self._endpoints[node_id] = EmuEndpoint(self, node_id)
            self._inbox[node_id] = []
        return self._endpoints[node_id]

    def subscribe(self, endpoint: EmuEndpoint, topic: str):
        self._subs.setdefault(topic, set()).add(endpoint.node_id)

    def close(self):
        self._closed = True

    def publish(self, endpoint: EmuEndpoint, topic: str, payload, now: float) -> int:
        if self._closed:
            raise TransportError("network is closed")
        key = (endpoint.node_id, topic)
        seq = self._seq.get(key, 0) + 1
        self._seq[key] = seq
        subscribers = sorted(self._subs.get(topic, ()) - {endpoint.node_id})
        dg = Datagram(topic=topic, sender=endpoint.node_id, sequence=seq,
                      send_time=now, payload=payload)
        records = emu_send(self.model, self.mode, dg, subscribers,
                           self.offered_load, now)
        self.physical_sends += physical_transmissions(self.mode, records)
        for rec in records:
            self.delivery_log.append(rec)
            if rec.delivered_at is not None:
                heapq.heappush(
                    self._inbox[rec.receiver],
                    (rec.delivered_at, rec.sender, rec.sequence, dg),
                )
        return seq

    def poll(self, endpoint: EmuEndpoint, now: float):
        if self._closed:
            raise TransportError("network is closed")
        inbox = self._inbox[endpoint.node_id]
        out = []
        while inbox and inbox[0][0] <= now:
            out.append(heapq.heappop(inbox)[3])
        return out

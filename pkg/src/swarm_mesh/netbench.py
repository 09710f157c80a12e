"""Network latency benchmark: all-to-all publishing, one-way delay CDFs."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .errors import ValidationError
from .metrics import _csv_header
from .transport import EmuNetwork, Preset, load_preset
from .transport.real import RealEndpoint


@dataclass
class CdfDataset:
    """One-way delay distribution for one (preset, rate) cell."""

    preset: str
    rate: float
    total_records: int
    delivered: int
    delays: list = field(default_factory=list)  # sorted, seconds
    saturated: bool = False

    @property
    def delivered_fraction(self) -> float:
        if self.total_records == 0:
            return 0.0
        return self.delivered / self.total_records

    def fraction_within(self, delay_s: float) -> float:
        """Fraction of *all* records delivered within delay_s (CDF value)."""
        if self.total_records == 0:
            return 0.0
        import bisect

        return bisect.bisect_right(self.delays, delay_s) / self.total_records

    def points(self):
        """(delay_s, cumulative fraction) pairs; bounded by delivered_fraction."""
        n = self.total_records
        return [(d, (k + 1) / n) for k, d in enumerate(self.delays)]

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(_csv_header(["delay_ms", "fraction"]))
            for delay, frac in self.points():
                fh.write(f"{delay * 1000.0},{frac}\n")


def bench_emulated(preset: Preset, nodes: int, rate: float, messages: int,
                   seed: int = 0) -> CdfDataset:
    """Emulated all-to-all benchmark: `messages` publishes at aggregate `rate`."""
    if nodes < 2:
        raise ValidationError("netbench needs at least two nodes")
    model = preset.with_seed(seed).model
    net = EmuNetwork(model, preset.mode, offered_load=rate)
    endpoints = [net.endpoint(k) for k in range(nodes)]
    for ep in endpoints:
        for other in range(nodes):
            if other != ep.node_id:
                ep.subscribe(f"bench/{other}")
    for m in range(messages):
        sender = endpoints[m % nodes]
        now = m / rate
        sender.publish(f"bench/{sender.node_id}", b"", now)
    delays = sorted(r.delay for r in net.delivery_log if r.delivered)
    return CdfDataset(
        preset=preset.name,
        rate=rate,
        total_records=len(net.delivery_log),
        delivered=len(delays),
        delays=delays,
    )


def bench_real(nodes: int, rate: float, duration: float, retry_limit: int = 0,
               inject_loss: float = 0.0, ack_timeout: float = 0.005,
               seed: int = 0) -> CdfDataset:
    """Loopback benchmark over the real datagram backend (shared host clock)."""
    if nodes < 2:
        raise ValidationError("netbench needs at least two nodes")
    endpoints = [
        RealEndpoint(node_id=k, retry_limit=retry_limit, ack_timeout=ack_timeout,
                     inject_loss=inject_loss, loss_seed=seed + k)
        for k in range(nodes)
    ]
    try:
        addrs = [ep.address for ep in endpoints]
        interval = nodes / rate  # per-node send period
        expected = int(rate * duration)
        start = time.monotonic()
        sent = 0
        for m in range(expected):
            due = start + m / rate
            now = time.monotonic()
            if due > now:
                time.sleep(due - now)
            sender = endpoints[m % nodes]
            for k in range(nodes):
                if k != sender.node_id:
                    sender.send_unicast(addrs[k], topic_id=1, payload=b"")
            sent += 1
        for ep in endpoints:
            ep.flush(timeout=max(1.0, ack_timeout * (retry_limit + 2) * 4))
        elapsed = time.monotonic() - start
        records = [r for ep in endpoints for r in ep.delivery_records]
        delivered = [r for r in records if r.delivered]
        lost = [r for r in records if not r.delivered]
        total = (len(delivered) + len(lost))
        delays = sorted(r.delay for r in delivered)
        return CdfDataset(
            preset=f"real-unicast-r{retry_limit}",
            rate=rate,
            total_records=total,
            delivered=len(delays),
            delays=delays,
            saturated=elapsed > duration * 1.5,
        )
    finally:
        for ep in endpoints:
            ep.close()


def run_netbench(nodes, rates, presets, backend="emu", duration=10.0,
                 seed=0, out_dir=None) -> list[CdfDataset]:
    """Sweep (preset, rate) cells and optionally write cdf_<preset>_<rate>.csv."""
    datasets = []
    for preset_name in presets:
        for rate in rates:
            if backend == "emu":
                preset = load_preset(preset_name)
                messages = max(1, int(rate * duration))
                ds = bench_emulated(preset, nodes, rate, messages, seed=seed)
            elif backend == "real":
                ds = bench_real(nodes, rate, duration, seed=seed)
                ds.preset = preset_name
            else:
                raise ValidationError(f"unknown backend {backend!r}")
            datasets.append(ds)
            if out_dir is not None:
                os.makedirs(out_dir, exist_ok=True)
                safe_rate = f"{rate:g}".replace(".", "_")
                ds.write_csv(os.path.join(out_dir, f"cdf_{ds.preset}_{safe_rate}.csv"))
    return datasets

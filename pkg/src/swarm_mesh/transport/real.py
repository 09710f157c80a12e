"""Real datagram backend over loopback/LAN.

Unicast uses application-layer positive acknowledgements with bounded
retransmission (standing in for 802.11 MAC retries, which commodity hosts do
not expose); multicast is a single send to a UDP multicast group with no
acks.  Loss can be injected at the receiver to exercise the retry path.

Wire format (little-endian, 28 bytes + payload):
    magic u32 | version u8 | flags u8 | topic-id u16 | sender u32 |
    sequence u64 | send-time microseconds u64
An ack is the same header with the ack flag set and no payload.  The upper
four flag bits carry the attempt number so receivers can log it.
"""

from __future__ import annotations

import random
import socket
import struct
import threading
import time
from dataclasses import dataclass

from ..errors import TransportError
from .model import Datagram, DeliveryRecord

HEADER = struct.Struct("<IBBHIQQ")
HEADER_SIZE = HEADER.size  # 28
MAGIC = 0x534D5348
WIRE_VERSION = 1
FLAG_ACK = 0x01

_clock = time.monotonic


def pack_frame(flags, topic_id, sender, sequence, send_time_s, payload=b""):
    head = HEADER.pack(MAGIC, WIRE_VERSION, flags, topic_id, sender,
                       sequence, int(send_time_s * 1e6))
    return head + payload


def unpack_frame(data):
    if len(data) < HEADER_SIZE:
        raise TransportError(f"short frame: {len(data)} bytes")
    magic, version, flags, topic_id, sender, sequence, send_us = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TransportError(f"bad magic 0x{magic:08x}")
    if version != WIRE_VERSION:
        raise TransportError(f"unsupported wire version {version}")
    return flags, topic_id, sender, sequence, send_us / 1e6, data[HEADER_SIZE:]


@dataclass
class _Pending:
    dest: tuple
    topic_id: int
    sequence: int
    payload: bytes
    first_sent: float
    attempts: int
    next_due: float


class RealEndpoint:
    """One datagram endpoint: socket, receiver thread, retransmit queue."""

    def __init__(
        self,
        node_id: int,
        bind_host: str = "127.0.0.1",
        retry_limit: int = 0,
        ack_timeout: float = 0.010,
        inject_loss: float = 0.0,
        loss_seed: int = 0,
        multicast_group: tuple | None = None,
    ):
        self.node_id = node_id
        self.retry_limit = retry_limit
        self.ack_timeout = ack_timeout
        self.inject_loss = inject_loss
        self._loss_rng = random.Random((loss_seed << 16) ^ node_id)
        self.multicast_group = multicast_group

        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        for opt in (socket.SO_RCVBUF, socket.SO_SNDBUF):
            try:
                self._sock.setsockopt(socket.SOL_SOCKET, opt, 1 << 20)
            except OSError:
                pass  # platform cap; defaults still work, just drop-prone
        if multicast_group is not None:
            group, port = multicast_group
            self._sock.bind((bind_host, port))
            mreq = socket.inet_aton(group) + socket.inet_aton("127.0.0.1")
            self._sock.setsockopt(socket.IPPROTO_IP, socket.IP_ADD_MEMBERSHIP, mreq)
            self._sock.setsockopt(socket.IPPROTO_IP, socket.IP_MULTICAST_LOOP, 1)
            self._sock.setsockopt(
                socket.IPPROTO_IP, socket.IP_MULTICAST_IF, socket.inet_aton("127.0.0.1")
            )
        else:
            self._sock.bind((bind_host, 0))
        self._sock.settimeout(0.001)

        self._seq: dict[int, int] = {}
        self._pending: dict[tuple, _Pending] = {}
        self._seen: set = set()
        self._inbox: list = []
        self.delivery_records: list[DeliveryRecord] = []
        self.acks_sent = 0
        self.acks_received = 0
        self._lock = threading.Lock()
        self._closed = False
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    @property
    def address(self) -> tuple:
        return self._sock.getsockname()

    # -- sending ----------------------------------------------------------

    def _next_seq(self, topic_id: int) -> int:
        seq = self._seq.get(topic_id, 0) + 1
        self._seq[topic_id] = seq
        return seq

    def send_unicast(self, dest: tuple, topic_id: int, payload: bytes) -> int:
        """Send to one peer; retransmits on ack timeout if retry_limit > 0."""
        if self._closed:
            raise TransportError("endpoint is closed")
        seq = self._next_seq(topic_id)
        now = _clock()
        frame = pack_frame(1 << 4, topic_id, self.node_id, seq, now, payload)
        # register before sending: on loopback the ack can beat the return
        with self._lock:
            self._pending[(dest, topic_id, seq)] = _Pending(
                dest=dest, topic_id=topic_id, sequence=seq, payload=payload,
                first_sent=now, attempts=1, next_due=now + self.ack_timeout,
            )
        try:
            self._sock.sendto(frame, dest)
        except OSError as exc:
            with self._lock:
                self._pending.pop((dest, topic_id, seq), None)
            raise TransportError(f"send failed: {exc}") from exc
        return seq

    def send_multicast(self, topic_id: int, payload: bytes) -> int:
        """Single send to the multicast group; no acks, no retransmission."""
        if self._closed:
            raise TransportError("endpoint is closed")
        if self.multicast_group is None:
            raise TransportError("endpoint has no multicast group")
        seq = self._next_seq(topic_id)
        frame = pack_frame(1 << 4, topic_id, self.node_id, seq, _clock(), payload)
        try:
            self._sock.sendto(frame, self.multicast_group)
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc
        return seq

    # -- receiving --------------------------------------------------------

    def poll(self):
        """Drain received datagrams as (Datagram, receive_time) pairs."""
        with self._lock:
            out = self._inbox
            self._inbox = []
        return out

    def pending_count(self) -> int:
        with self._lock:
            return len(self._pending)

    def flush(self, timeout: float = 5.0) -> bool:
        """Wait until every pending unicast is acked or given up."""
        deadline = _clock() + timeout
        while _clock() < deadline:
            if self.pending_count() == 0:
                return True
            time.sleep(0.002)
        return self.pending_count() == 0

    def _loop(self):
        while not self._closed:
            self._retransmit_due()
            try:
                data, addr = self._sock.recvfrom(65536)
            except socket.timeout:
                continue
            except OSError:
                break
            try:
                flags, topic_id, sender, seq, send_time, payload = unpack_frame(data)
            except TransportError:
                continue
            if sender == self.node_id:
                continue  # own multicast loopback
            if flags & FLAG_ACK:
                self._on_ack(addr, topic_id, sender, seq)
            else:
                self._on_data(addr, flags, topic_id, sender, seq, send_time, payload)

    def _on_ack(self, addr, topic_id, sender, seq):
        with self._lock:
            key = (addr, topic_id, seq)
            entry = self._pending.pop(key, None)
            if entry is not None:
                self.acks_received += 1

    def _on_data(self, addr, flags, topic_id, sender, seq, send_time, payload):
        if self.inject_loss > 0.0 and self._loss_rng.random() < self.inject_loss:
            return  # simulated medium loss: no ack, sender will retry
        attempt = flags >> 4
        if self.multicast_group is None:
            ack = pack_frame(FLAG_ACK | (attempt << 4), topic_id, self.node_id,
                             seq, _clock(), b"")
            try:
                self._sock.sendto(ack, addr)
                self.acks_sent += 1
            except OSError:
                pass
        key = (sender, topic_id, seq)
        now = _clock()
        with self._lock:
            if key in self._seen:
                return  # duplicate of a retransmission
            self._seen.add(key)
            self.delivery_records.append(
                DeliveryRecord(sequence=seq, sender=sender, receiver=self.node_id,
                               sent_at=send_time, delivered_at=now,
                               attempts=max(attempt, 1))
            )
            self._inbox.append(
                (Datagram(topic=str(topic_id), sender=sender, sequence=seq,
                          send_time=send_time, payload=payload), now)
            )

    def _retransmit_due(self):
        now = _clock()
        with self._lock:
            due = [e for e in self._pending.values() if e.next_due <= now]
        for entry in due:
            if entry.attempts > self.retry_limit:
                with self._lock:
                    key = (entry.dest, entry.topic_id, entry.sequence)
                    if key in self._pending:
                        del self._pending[key]
                        self.delivery_records.append(
                            DeliveryRecord(sequence=entry.sequence,
                                           sender=self.node_id,
                                           receiver=-1,
                                           sent_at=entry.first_sent,
                                           delivered_at=None,
                                           attempts=entry.attempts)
                        )
                continue
            entry.attempts += 1
            entry.next_due = now + self.ack_timeout
            frame = pack_frame(min(entry.attempts, 15) << 4, entry.topic_id,
                               self.node_id, entry.sequence, entry.first_sent,
                               entry.payload)
            try:
                self._sock.sendto(frame, entry.dest)
            except OSError:
                pass

    def close(self):
        self._closed = True
        self._thread.join(timeout=1.0)
        self._sock.close()

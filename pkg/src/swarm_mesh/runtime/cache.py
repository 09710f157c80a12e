"""Per-agent message cache with latest-wins and staleness filtering."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..policy import Message


@dataclass
class MessageCache:
    """Keeps the newest message per sender, served only while fresh.

    staleness is the window after receipt beyond which an entry is never
    served; newest is decided by the message send timestamp, so out-of-order
    arrivals cannot clobber fresher data.
    """

    staleness: float
    _entries: dict[int, tuple[Message, float]] = field(default_factory=dict)

    def update(self, msg: Message, received_at: float) -> None:
        current = self._entries.get(msg.sender)
        if current is not None and current[0].sent_at > msg.sent_at:
            return  # stale reordering: keep the newer message
        self._entries[msg.sender] = (msg, received_at)

    def snapshot(self, now: float, senders=None) -> list[Message]:
        """Fresh messages in ascending sender id, optionally restricted."""
        out = []
        for sender in sorted(self._entries):
            if senders is not None and sender not in senders:
                continue
            msg, received_at = self._entries[sender]
            if now - received_at <= self.staleness:
                out.append(msg)
        return out

    def clear(self) -> None:
        self._entries.clear()

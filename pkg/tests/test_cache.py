import numpy as np

from swarm_mesh.policy import Message
from swarm_mesh.runtime import MessageCache


def msg(sender, sent_at, value=0.0):
    return Message(sender=sender, sent_at=sent_at, payload=np.array([value]))


class TestMessageCache:
    def test_latest_wins(self):
        cache = MessageCache(staleness=0.2)
        cache.update(msg(3, 0.0, value=1.0), received_at=0.0)
        cache.update(msg(3, 0.1, value=2.0), received_at=0.1)
        [kept] = cache.snapshot(now=0.1)
        assert kept.payload[0] == 2.0

    def test_out_of_order_arrival_discarded(self):
        cache = MessageCache(staleness=0.2)
        cache.update(msg(3, 0.1, value=2.0), received_at=0.1)
        cache.update(msg(3, 0.0, value=1.0), received_at=0.15)  # older send
        [kept] = cache.snapshot(now=0.2)
        assert kept.sent_at == 0.1

    def test_stale_entries_excluded(self):
        cache = MessageCache(staleness=0.2)
        cache.update(msg(1, 0.0), received_at=0.0)
        assert len(cache.snapshot(now=0.2)) == 1  # boundary: still fresh
        assert cache.snapshot(now=0.21) == []

    def test_one_entry_per_sender(self):
        cache = MessageCache(staleness=1.0)
        for t in (0.0, 0.1, 0.2):
            cache.update(msg(5, t), received_at=t)
        assert len(cache.snapshot(now=0.2)) == 1

    def test_ascending_sender_order(self):
        cache = MessageCache(staleness=1.0)
        for sender in (4, 1, 3, 2):
            cache.update(msg(sender, 0.0), received_at=0.0)
        assert [m.sender for m in cache.snapshot(now=0.0)] == [1, 2, 3, 4]

    def test_sender_filter(self):
        cache = MessageCache(staleness=1.0)
        for sender in (1, 2, 3):
            cache.update(msg(sender, 0.0), received_at=0.0)
        got = cache.snapshot(now=0.0, senders={1, 3})
        assert [m.sender for m in got] == [1, 3]

    def test_clear(self):
        cache = MessageCache(staleness=1.0)
        cache.update(msg(1, 0.0), received_at=0.0)
        cache.clear()
        assert cache.snapshot(now=0.0) == []

"""In-process publish/subscribe bus standing in for a DDS domain.

Each subscription keeps one bounded queue per channel; when a queue is full
the oldest message is discarded and a warning is logged.  Messages carry a
global sequence number, and a subscription hands them out in that order.
"""

from __future__ import annotations

import itertools
import logging
import threading
import time
from collections import deque
from typing import Iterable, Iterator

from resin.runtime.values import TYPES, BusMessage, TypedValue

log = logging.getLogger(__name__)


class ChannelTypeError(TypeError):
    pass


class Subscription:
    def __init__(self, bus: "Bus", channels: Iterable[str], bound: int):
        self.bus = bus
        self.channels = tuple(dict.fromkeys(channels))
        self.queues: dict[str, deque[BusMessage]] = {c: deque() for c in self.channels}
        self.bound = bound
        self.dropped = 0
        self._cond = threading.Condition()
        self.closed = False

    def _deliver(self, msg: BusMessage) -> None:
        with self._cond:
            q = self.queues[msg.channel]
            if len(q) >= self.bound:
                q.popleft()
                self.dropped += 1
                log.warning("queue for %s full (%d); dropped oldest message", msg.channel, self.bound)
            q.append(msg)
            self._cond.notify()

    def _pop(self) -> BusMessage | None:
        heads = [q for q in self.queues.values() if q]
        if not heads:
            return None
        return min(heads, key=lambda q: q[0].seq).popleft()

    def get(self, timeout: float | None = None) -> BusMessage | None:
        """Next message in publication order, or None on timeout/close."""
        with self._cond:
            msg = self._pop()
            if msg is not None or timeout == 0:
                return msg
            self._cond.wait_for(lambda: self.closed or any(self.queues.values()), timeout)
            return self._pop()

    def drain(self) -> list[BusMessage]:
        with self._cond:
            out = []
            while (msg := self._pop()) is not None:
                out.append(msg)
            return out

    def close(self) -> None:
        with self._cond:
            self.closed = True
            self._cond.notify_all()
        self.bus._unsubscribe(self)

    def __iter__(self) -> Iterator[BusMessage]:
        while not self.closed:
            msg = self.get(timeout=0.1)
            if msg is not None:
                yield msg


class Bus:
    def __init__(self, queue_bound: int = 1024):
        self.queue_bound = queue_bound
        self.types: dict[str, str] = {}
        self._subs: dict[str, list[Subscription]] = {}
        self._lock = threading.Lock()
        self._seq = itertools.count(1)

    def declare(self, channel: str, type_name: str) -> None:
        if type_name not in TYPES:
            raise ChannelTypeError(f"unknown signal type {type_name!r}")
        with self._lock:
            known = self.types.setdefault(channel, type_name)
        if known != type_name:
            raise ChannelTypeError(f"channel {channel} carries {known}, not {type_name}")

    def subscribe(self, channels: str | Iterable[str], bound: int | None = None) -> Subscription:
        if isinstance(channels, str):
            channels = [channels]
        sub = Subscription(self, channels, bound or self.queue_bound)
        with self._lock:
            for c in sub.channels:
                self._subs.setdefault(c, []).append(sub)
        return sub

    def _unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            for c in sub.channels:
                if sub in self._subs.get(c, []):
                    self._subs[c].remove(sub)

    def publish(self, channel: str, value: TypedValue, timestamp: float | None = None) -> BusMessage:
        expected = self.types.get(channel)
        if expected is not None and expected != value.type_name:
            raise ChannelTypeError(f"channel {channel} carries {expected}, got {value.type_name}")
        with self._lock:
            msg = BusMessage(channel, value, time.monotonic() if timestamp is None else timestamp, next(self._seq))
            subs = list(self._subs.get(channel, ()))
            # delivery under the bus lock keeps per-channel order across publishers
            for sub in subs:
                sub._deliver(msg)
        return msg

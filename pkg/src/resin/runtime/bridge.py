"""Socket bridge: newline-delimited JSON between external processes and the bus.

Each line a client sends is either a message::

    {"channel": "/a", "type": "Probability", "value": 0.3, "timestamp": 12.5}

(Density messages carry ``mean`` and ``stddev`` instead of ``value``) or a
subscription request ``{"subscribe": "/d"}``, after which every message on
that channel is written back to the client in the same format.  Malformed
lines are answered with ``{"error": "..."}`` and otherwise ignored.
"""

from __future__ import annotations

import json
import logging
import socket
import socketserver
import threading
from typing import Iterator

from resin.runtime.bus import Bus, ChannelTypeError
from resin.runtime.values import BusMessage, TypedValue

log = logging.getLogger(__name__)


class _Handler(socketserver.StreamRequestHandler):
    server: "BridgeServer"

    def handle(self) -> None:
        write_lock = threading.Lock()
        forwarders: list[threading.Thread] = []
        subs = []
        done = threading.Event()

        def send(doc: dict) -> None:
            data = (json.dumps(doc) + "\n").encode()
            with write_lock:
                try:
                    self.wfile.write(data)
                    self.wfile.flush()
                except OSError:
                    done.set()

        def forward(sub) -> None:
            while not done.is_set():
                msg = sub.get(timeout=0.1)
                if msg is not None:
                    send(msg.to_json())

        try:
            for raw in self.rfile:
                line = raw.decode("utf-8", "replace").strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                    if not isinstance(doc, dict):
                        raise ValueError("expected a JSON object")
                    if "subscribe" in doc:
                        sub = self.server.bus.subscribe(str(doc["subscribe"]))
                        subs.append(sub)
                        t = threading.Thread(target=forward, args=(sub,), daemon=True)
                        t.start()
                        forwarders.append(t)
                        continue
                    msg = BusMessage.from_json(doc)
                    self.server.bus.publish(msg.channel, msg.value, msg.timestamp)
                except (ValueError, TypeError, ChannelTypeError) as exc:
                    send({"error": str(exc)})
        finally:
            done.set()
            for sub in subs:
                sub.close()


class BridgeServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, bus: Bus, host: str = "127.0.0.1", port: int = 0):
        self.bus = bus
        super().__init__((host, port), _Handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[:2]

    def start(self) -> "BridgeServer":
        self._thread = threading.Thread(target=self.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()


class BridgeClient:
    def __init__(self, host: str, port: int, timeout: float | None = 5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.reader = self.sock.makefile("r", encoding="utf-8")

    def _send(self, doc: dict) -> None:
        self.sock.sendall((json.dumps(doc) + "\n").encode())

    def publish(self, channel: str, value: TypedValue, timestamp: float) -> None:
        self._send(BusMessage(channel, value, timestamp).to_json())

    def subscribe(self, channel: str) -> None:
        self._send({"subscribe": channel})

    def read(self) -> dict | None:
        line = self.reader.readline()
        return json.loads(line) if line else None

    def messages(self) -> Iterator[BusMessage]:
        while (doc := self.read()) is not None:
            if "error" not in doc:
                yield BusMessage.from_json(doc)

    def close(self) -> None:
        try:
            self.reader.close()
        finally:
            self.sock.close()

    def __enter__(self) -> "BridgeClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

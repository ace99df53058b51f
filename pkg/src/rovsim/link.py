"""Emulated tether data path with optional impairments.

The physical tether is a powered Ethernet run; in software it is a FIFO of
byte chunks with three scenario-configurable faults: fixed delivery
latency, whole-frame drop probability, and per-byte corruption probability
(one random bit flipped). All randomness comes from a caller-supplied
seeded generator, so impaired runs replay exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinkConfig:
    latency_ms: float = 0.0
    drop_prob: float = 0.0
    corrupt_prob: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.latency_ms) and self.latency_ms >= 0):
            raise ValueError(f"latency_ms must be >= 0, got {self.latency_ms}")
        for name in ("drop_prob", "corrupt_prob"):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {value}")

    @property
    def transparent(self) -> bool:
        return self.latency_ms == 0 and self.drop_prob == 0 and self.corrupt_prob == 0

    @classmethod
    def from_dict(cls, data: dict) -> "LinkConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown link keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass
class LinkStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    corrupted: int = 0


class TetherLink:
    """One direction of the tether; send() now, poll() what has arrived."""

    def __init__(self, config: LinkConfig, rng: np.random.Generator | None = None):
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.stats = LinkStats()
        self._queue: deque[tuple[float, bytes]] = deque()

    def send(self, data: bytes, now: float) -> None:
        self.stats.sent += 1
        cfg = self.config
        if cfg.drop_prob > 0 and self.rng.random() < cfg.drop_prob:
            self.stats.dropped += 1
            return
        if cfg.corrupt_prob > 0:
            hits = np.nonzero(self.rng.random(len(data)) < cfg.corrupt_prob)[0]
            if hits.size:
                corrupted = bytearray(data)
                bits = self.rng.integers(0, 8, size=hits.size)
                for index, bit in zip(hits, bits):
                    corrupted[int(index)] ^= 1 << int(bit)
                data = bytes(corrupted)
                self.stats.corrupted += 1
        self._queue.append((now + cfg.latency_ms / 1000.0, data))

    def poll(self, now: float) -> list[bytes]:
        """Chunks whose delivery time has arrived, in send order."""
        out: list[bytes] = []
        while self._queue and self._queue[0][0] <= now + 1e-12:
            out.append(self._queue.popleft()[1])
            self.stats.delivered += 1
        return out

"""Tether impairment shim tests: latency, drops, corruption, determinism."""

import numpy as np
import pytest

from rovsim import telemetry as tm
from rovsim.link import LinkConfig, TetherLink

FRAME = tm.encode_frame(tm.Ping(seq=0))


def link(config, seed=0):
    return TetherLink(config, rng=np.random.default_rng(seed))


def test_transparent_link_delivers_immediately_in_order():
    lk = link(LinkConfig())
    lk.send(b"one", now=0.0)
    lk.send(b"two", now=0.0)
    assert lk.poll(0.0) == [b"one", b"two"]
    assert lk.poll(0.0) == []


def test_latency_delays_delivery():
    lk = link(LinkConfig(latency_ms=60.0))
    lk.send(FRAME, now=1.0)
    assert lk.poll(1.0) == []
    assert lk.poll(1.04) == []
    assert lk.poll(1.06) == [FRAME]


def test_drop_probability_one_drops_everything():
    lk = link(LinkConfig(drop_prob=1.0))
    for _ in range(20):
        lk.send(FRAME, now=0.0)
    assert lk.poll(10.0) == []
    assert lk.stats.dropped == 20
    assert lk.stats.sent == 20


def test_corruption_breaks_crc():
    lk = link(LinkConfig(corrupt_prob=1.0), seed=5)
    lk.send(FRAME, now=0.0)
    (delivered,) = lk.poll(0.0)
    assert delivered != FRAME
    messages, _, _ = tm.decode_stream(delivered)
    assert messages == []
    assert lk.stats.corrupted == 1


def test_seeded_determinism():
    def run(seed):
        lk = link(LinkConfig(drop_prob=0.3, corrupt_prob=0.01), seed=seed)
        out = []
        for k in range(50):
            lk.send(FRAME, now=0.02 * k)
            out.extend(lk.poll(0.02 * k))
        return out

    assert run(7) == run(7)
    assert run(7) != run(8)


def test_config_validation():
    with pytest.raises(ValueError):
        LinkConfig(latency_ms=-1.0)
    with pytest.raises(ValueError):
        LinkConfig(drop_prob=1.5)
    with pytest.raises(ValueError):
        LinkConfig.from_dict({"lag": 3})
    assert LinkConfig.from_dict({"latency_ms": 10}).latency_ms == 10.0
    assert LinkConfig().transparent
    assert not LinkConfig(drop_prob=0.1).transparent

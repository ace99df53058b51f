"""Onboard attitude and depth estimation.

Heading comes from a first-order complementary filter: the gyro rate is
integrated for the high-frequency path and blended toward the absolute
magnetometer heading along the shortest arc, so the estimate behaves
correctly across the +/-pi seam. Depth is a plain moving average over the
hydrostatic conversion of the pressure channel; no fusion is needed there.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace

from .angles import angle_diff, wrap_angle

DEFAULT_ALPHA = 0.98  # gyro weight at the 50 Hz loop rate
DEPTH_AVERAGE_WINDOW = 5


@dataclass(frozen=True)
class FilterState:
    """Complementary-filter state: current estimate and blend weight."""

    yaw_est: float = 0.0
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if not math.isfinite(self.yaw_est):
            raise ValueError("yaw_est must be finite")
        if not (math.isfinite(self.alpha) and 0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        object.__setattr__(self, "yaw_est", wrap_angle(self.yaw_est))


def filter_update(fs: FilterState, gyro_z: float, mag_yaw: float, dt: float) -> FilterState:
    """One fusion step: propagate by the gyro, correct toward the magnetometer.

    The correction is applied on the shortest signed arc from the
    gyro-propagated estimate to the measurement, so the result always lies
    between the two (inclusive) along that arc. alpha = 1 is pure
    integration, alpha = 0 passes the measurement through exactly.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if not (math.isfinite(gyro_z) and math.isfinite(mag_yaw)):
        raise ValueError("gyro_z and mag_yaw must be finite")
    predicted = wrap_angle(fs.yaw_est + gyro_z * dt)
    if fs.alpha == 1.0:
        new_yaw = predicted
    elif fs.alpha == 0.0:
        new_yaw = wrap_angle(mag_yaw)
    else:
        new_yaw = wrap_angle(predicted + (1.0 - fs.alpha) * angle_diff(mag_yaw, predicted))
    return replace(fs, yaw_est=new_yaw)


class DepthAverager:
    """Moving average over the most recent depth measurements."""

    def __init__(self, window: int = DEPTH_AVERAGE_WINDOW):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self._samples: deque[float] = deque(maxlen=window)

    def update(self, depth_measurement: float) -> float:
        if not math.isfinite(depth_measurement):
            raise ValueError("depth measurement must be finite")
        self._samples.append(depth_measurement)
        return sum(self._samples) / len(self._samples)

    @property
    def value(self) -> float:
        if not self._samples:
            raise ValueError("no depth samples yet")
        return sum(self._samples) / len(self._samples)

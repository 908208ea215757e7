from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from .exc import ArgumentError

__all__ = ("ImuBatch", "BatchKind")

BatchKind = Literal["increments", "rates"]

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class ImuBatch:
    """
    ``N`` uniformly spaced gyro/accelerometer samples covering one update
    interval ``[t_start, t_start + t_span]``.

    With ``kind="increments"`` row ``k`` holds the angular and velocity
    increments over the ``k``-th subinterval; with ``kind="rates"`` it holds
    angular velocity and specific force sampled at the subinterval end.
    """

    t_start: float
    t_span: float
    gyro: FloatArray
    accel: FloatArray
    kind: BatchKind = "increments"

    def __post_init__(self) -> None:
        gyro = np.array(self.gyro, dtype=np.float64)
        accel = np.array(self.accel, dtype=np.float64)
        if gyro.ndim != 2 or gyro.shape[1] != 3 or gyro.shape != accel.shape:
            raise ArgumentError(
                "Expected two (N, 3) sample arrays, got %r and %r"
                % (gyro.shape, accel.shape)
            )
        if gyro.shape[0] < 2:
            raise ArgumentError("A batch needs at least 2 samples")
        if not self.t_span > 0.0:
            raise ArgumentError("Interval length must be positive")
        gyro.flags.writeable = False
        accel.flags.writeable = False
        object.__setattr__(self, "gyro", gyro)
        object.__setattr__(self, "accel", accel)

    @property
    def n_samples(self) -> int:
        return int(self.gyro.shape[0])

    @property
    def sample_period(self) -> float:
        return self.t_span / self.n_samples

    @property
    def times(self) -> FloatArray:
        """Subinterval end times ``t_1 .. t_N`` relative to ``t_start``."""
        return self.t_span * np.arange(1, self.n_samples + 1) / self.n_samples

    def split(self, n: int) -> list["ImuBatch"]:
        """
        Consecutive sub-batches of ``n`` samples each. Trailing samples that do
        not fill a whole sub-batch are dropped.
        """
        if n < 2:
            raise ArgumentError("A sub-batch needs at least 2 samples, got %d" % n)
        count = self.n_samples // n
        return [
            ImuBatch(
                t_start=self.t_start + self.t_span * (k * n) / self.n_samples,
                t_span=self.t_span * n / self.n_samples,
                gyro=self.gyro[k * n : (k + 1) * n],
                accel=self.accel[k * n : (k + 1) * n],
                kind=self.kind,
            )
            for k in range(count)
        ]

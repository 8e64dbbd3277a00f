"""Ramp / sustain / exponential-decay learning-rate curve."""

from typing import List, Tuple

from ..models.schedule import LrSchedule


def lr_at(epoch: int, s: LrSchedule) -> float:
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    if epoch < s.ramp_epochs:
        return s.lr_start + (s.lr_max - s.lr_start) * epoch / s.ramp_epochs
    if epoch <= s.decay_start:
        return s.lr_max
    return s.lr_min + (s.lr_max - s.lr_min) * s.decay ** (epoch - s.decay_start)


def lr_series(epochs: int, s: LrSchedule) -> List[Tuple[int, float]]:
    return [(epoch, lr_at(epoch, s)) for epoch in range(epochs)]

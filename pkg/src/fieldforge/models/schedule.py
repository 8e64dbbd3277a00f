"""
Learning-rate schedule parameters
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class LrSchedule(BaseModel):
    """
    Ramp, sustain, exponential decay

    The defaults are representative values only: linear ramp from 1e-5 to
    1e-3 over five epochs, no sustain, then decay towards 1e-5 by a factor of
    0.8 per epoch.
    """

    model_config = ConfigDict(frozen=True)

    lr_start: float = Field(default=1e-5, gt=0)
    lr_max: float = Field(default=1e-3, gt=0)
    lr_min: float = Field(default=1e-5, gt=0)
    ramp_epochs: int = Field(default=5, ge=0)
    sustain_epochs: int = Field(default=0, ge=0)
    decay: float = Field(default=0.8, gt=0, lt=1)

    @model_validator(mode="after")
    def check_levels(self) -> "LrSchedule":
        if not self.lr_min <= self.lr_start <= self.lr_max:
            raise ValueError("learning rates must satisfy lr_min <= lr_start <= lr_max")
        return self

    @property
    def decay_start(self) -> int:
        return self.ramp_epochs + self.sustain_epochs

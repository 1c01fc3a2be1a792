"""
Module containing environment states and the MountainCar configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.pcis.core.schema.features import StateBox

MOUNTAIN_CAR_SAFE_BOX = StateBox(lower=(-1.5, -0.07), upper=(0.6, 0.07))


@dataclass(frozen=True, eq=False)
class EnvState:
    """
    Result of a reset or a step.

    Attributes:
        observation: State after the step.
        reward: Reward of the step (0 after a reset).
        terminal: The goal region was reached.
        unsafe_exit: The state left the safe set.
    """

    observation: np.ndarray
    reward: float = 0.0
    terminal: bool = False
    unsafe_exit: bool = False


class MountainCarConfig(BaseModel):
    """
    Pydantic model for the unclipped MountainCar dynamics
    v' = v + thrust_gain (u - 1) - gravity_gain cos(3 x), x' = x + v'.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    thrust_gain: float = Field(1e-3, gt=0.0)
    gravity_gain: float = Field(2.5e-3, gt=0.0)
    goal_position: float = 0.5
    goal_min_velocity: float = 0.0
    safe_box: StateBox = MOUNTAIN_CAR_SAFE_BOX
    init_position_range: tuple[float, float] = (-0.6, -0.4)
    init_velocity: float = 0.0

    @model_validator(mode="after")
    def validate_initial_region(self) -> MountainCarConfig:
        """
        The initial-state region must be a nonempty interval inside the safe box.
        :return: The validated config.
        """
        low, high = self.init_position_range
        if low > high:
            raise ValueError(f"init_position_range {self.init_position_range} is reversed.")
        corners = np.array([[low, self.init_velocity], [high, self.init_velocity]])
        if not np.all(self.safe_box.contains(corners)):
            raise ValueError("The initial-state region must lie inside the safe box.")
        return self

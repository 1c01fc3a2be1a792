"""
Module containing the state box model shared by feature maps, lattices and environments.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class StateBox(BaseModel):
    """
    Axis-aligned box in state units, e.g. the MountainCar safe set
    [-1.5, 0.6] x [-0.07, 0.07].
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @model_validator(mode="after")
    def validate_bounds(self) -> StateBox:
        """
        Validate that both corners have the same dimension and lower < upper on every axis.
        :return: The validated box.
        :raises: ValueError if the box is empty or malformed.
        """
        if len(self.lower) == 0 or len(self.lower) != len(self.upper):
            raise ValueError(
                f"Box corners must have the same nonzero dimension, got "
                f"{len(self.lower)} and {len(self.upper)}."
            )
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper, strict=True)):
            raise ValueError(f"Box lower {self.lower} must be below upper {self.upper}.")
        return self

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    @property
    def upper_array(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    @property
    def widths(self) -> np.ndarray:
        return self.upper_array - self.lower_array

    def contains(self, states: np.ndarray) -> np.ndarray:
        """
        Closed-box membership.
        :param states: (n,) or (T, n) array of states.
        :return: bool, or (T,) bool array.
        """
        states = np.asarray(states, dtype=float)
        inside = (states >= self.lower_array) & (states <= self.upper_array)
        return np.all(inside, axis=-1)

    def clamp(self, states: np.ndarray) -> np.ndarray:
        """
        Clamp states onto the box.
        :param states: (n,) or (T, n) array of states.
        :return: Array of the same shape inside the box.
        """
        return np.clip(np.asarray(states, dtype=float), self.lower_array, self.upper_array)

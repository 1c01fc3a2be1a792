"""
Module containing the stepping interface shared by every simulated environment.
"""

from abc import ABC, abstractmethod

import numpy as np

from src.pcis.core.schema.environment import EnvState
from src.pcis.core.schema.features import StateBox


class Environment(ABC):
    """
    A single environment instance with its own random stream. Instances are not shared
    between rollouts.
    """

    action_count: int
    state_dimension: int
    safe_box: StateBox

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.state: np.ndarray | None = None

    @abstractmethod
    def reset(self) -> EnvState:
        """
        Draw an initial state.
        :return: The initial EnvState.
        """

    @abstractmethod
    def step(self, action: int) -> EnvState:
        """
        Apply an action to the current state.
        :param action: Action index.
        :return: The resulting EnvState.
        """

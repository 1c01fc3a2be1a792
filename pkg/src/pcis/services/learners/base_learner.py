"""
Module containing the proposal learner interface. Learners only see executed
transitions; the shield decides what gets executed.
"""

from abc import ABC, abstractmethod

import numpy as np

from src.pcis.constants import DatasetTag
from src.pcis.core.exceptions import DataSeparationError
from src.pcis.core.schema.config.config import ExplorationModel
from src.pcis.core.schema.transitions import Transition
from src.pcis.services.learners.exploration import epsilon_at


class ProposalLearner(ABC):
    """
    Epsilon-greedy learner proposing actions to the shield.
    """

    def __init__(self, action_count: int, exploration: ExplorationModel):
        self.action_count = action_count
        self.exploration = exploration

    @abstractmethod
    def value_estimates(self, state: np.ndarray) -> np.ndarray:
        """
        Action-value estimates at a state.
        :param state: Continuous or index-coordinate state.
        :return: (|U|,) values.
        """

    @abstractmethod
    def start_episode(self) -> None:
        """Reset per-episode state such as eligibility traces."""

    @property
    @abstractmethod
    def weights(self) -> np.ndarray:
        """Flat copy of the learned parameters."""

    @abstractmethod
    def _apply_update(self, transition: Transition, next_action: int | None) -> None: ...

    def propose_action(self, state: np.ndarray, rng: np.random.Generator, t: int) -> int:
        """
        With probability epsilon(t) a uniform action, otherwise the greedy one with ties
        to the lowest index. Always consumes one uniform draw so streams stay aligned.
        :param state: Current state.
        :param rng: Exploration stream.
        :param t: Executed step count.
        :return: Proposed action.
        """
        if rng.random() < epsilon_at(self.exploration, t):
            return int(rng.integers(self.action_count))
        return int(np.argmax(self.value_estimates(state)))

    def update(self, transition: Transition, next_action: int | None = None) -> None:
        """
        Learn from one executed transition.
        :param transition: The executed step, carrying the executed (shielded) action.
        :param next_action: Executed action at the next state for on-policy learners,
            ignored on terminal transitions.
        :raises DataSeparationError: If handed a certification transition.
        """
        if transition.tag == DatasetTag.CERTIFICATION:
            raise DataSeparationError("Certification transitions must never update a learner.")
        self._apply_update(transition, next_action)

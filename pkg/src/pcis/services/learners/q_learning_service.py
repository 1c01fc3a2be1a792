"""
Tabular one-step Q-learning for finite MDPs.
"""

import numpy as np

from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.config.config import ExplorationModel
from src.pcis.core.schema.transitions import Transition
from src.pcis.services.learners.base_learner import ProposalLearner


class TabularQLearner(ProposalLearner):
    """
    Q(s, u) <- Q(s, u) + alpha (r + gamma max_u' Q(s', u') - Q(s, u)), with zero bootstrap
    on terminal transitions or when s' is the sink.
    """

    def __init__(
        self,
        state_count: int,
        action_count: int,
        exploration: ExplorationModel,
        alpha: float = 0.1,
        gamma: float = 0.99,
    ):
        super().__init__(action_count, exploration)
        self.state_count = state_count
        self.alpha = alpha
        self.gamma = gamma
        self.table = np.zeros((state_count, action_count))

    @property
    def weights(self) -> np.ndarray:
        return self.table.reshape(-1).copy()

    def index(self, state: np.ndarray) -> int:
        return int(round(float(np.asarray(state, dtype=float).reshape(-1)[0])))

    def value_estimates(self, state: np.ndarray) -> np.ndarray:
        index = self.index(state)
        if not 0 <= index < self.state_count:
            return np.zeros(self.action_count)
        return self.table[index].copy()

    def start_episode(self) -> None:
        pass

    def _apply_update(self, transition: Transition, next_action: int | None) -> None:
        state, action = self.index(transition.state), int(transition.action)
        if not 0 <= state < self.state_count or not 0 <= action < self.action_count:
            raise InvalidArgumentError(f"State-action pair ({state}, {action}) out of range.")

        successor = self.index(transition.next_state)
        bootstrap = 0.0
        if not transition.terminal and 0 <= successor < self.state_count:
            bootstrap = self.gamma * float(self.table[successor].max())
        target = transition.reward + bootstrap
        self.table[state, action] += self.alpha * (target - self.table[state, action])

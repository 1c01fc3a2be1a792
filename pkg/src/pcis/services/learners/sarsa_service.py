"""
Linear true-online SARSA(lambda) over state features, Q(s, u) = w_u^T psi(s).
"""

from collections.abc import Callable

import numpy as np

from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.config.config import ExplorationModel
from src.pcis.core.schema.transitions import Transition
from src.pcis.services.learners.base_learner import ProposalLearner


class TrueOnlineSarsaLearner(ProposalLearner):
    """
    True-online SARSA(lambda) with dutch traces. Per step, with x = e_u (x) psi(s):

        delta = r + gamma Q' - Q
        z <- gamma lambda z + (1 - alpha gamma lambda z^T x) x
        w <- w + alpha (delta + Q - Q_old) z - alpha (Q - Q_old) x
        Q_old <- Q'

    where Q' = 0 on terminal transitions. Traces and Q_old reset at episode starts.
    """

    def __init__(
        self,
        state_features: Callable[[np.ndarray], np.ndarray],
        feature_count: int,
        action_count: int,
        exploration: ExplorationModel,
        alpha: float = 1e-3,
        gamma: float = 0.99,
        lambda_trace: float = 0.9,
    ):
        """
        Constructor for the SARSA learner.
        :param state_features: Maps (T, n) states to (T, feature_count) features psi.
        :param feature_count: Size of psi.
        :param action_count: |U|.
        :param exploration: Epsilon schedule.
        """
        super().__init__(action_count, exploration)
        self.state_features = state_features
        self.feature_count = feature_count
        self.alpha = alpha
        self.gamma = gamma
        self.lambda_trace = lambda_trace
        self._weights = np.zeros((action_count, feature_count))
        self._traces = np.zeros_like(self._weights)
        self._q_old = 0.0

    @property
    def weights(self) -> np.ndarray:
        return self._weights.reshape(-1).copy()

    @property
    def traces(self) -> np.ndarray:
        return self._traces.copy()

    def psi(self, state: np.ndarray) -> np.ndarray:
        features = np.asarray(self.state_features(np.asarray(state, dtype=float).reshape(1, -1)))
        return features.reshape(-1)

    def value_estimates(self, state: np.ndarray) -> np.ndarray:
        return self._weights @ self.psi(state)

    def start_episode(self) -> None:
        self._traces.fill(0.0)
        self._q_old = 0.0

    def _apply_update(self, transition: Transition, next_action: int | None) -> None:
        action = int(transition.action)
        if not 0 <= action < self.action_count:
            raise InvalidArgumentError(f"Action {action} outside [0, {self.action_count}).")

        psi = self.psi(transition.state)
        x = np.zeros_like(self._weights)
        x[action] = psi
        q = float(self._weights[action] @ psi)

        if transition.terminal:
            q_next = 0.0
        else:
            if next_action is None:
                raise InvalidArgumentError("Non-terminal SARSA updates need the next action.")
            q_next = float(self._weights[int(next_action)] @ self.psi(transition.next_state))

        decay = self.gamma * self.lambda_trace
        delta = transition.reward + self.gamma * q_next - q
        trace_dot = float(np.sum(self._traces * x))
        self._traces = decay * self._traces + (1.0 - self.alpha * decay * trace_dot) * x
        self._weights += self.alpha * (delta + q - self._q_old) * self._traces
        self._weights -= self.alpha * (q - self._q_old) * x
        self._q_old = q_next

        if transition.terminal:
            self.start_episode()

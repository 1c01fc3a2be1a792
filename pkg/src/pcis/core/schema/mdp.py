"""
Module containing the finite MDP model with a known kernel used by the oracle
and the finite environment.
"""

from dataclasses import dataclass

import numpy as np

from src.pcis.core.exceptions import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class FiniteMdpModel:
    """
    Finite MDP over states {0..S-1} plus an absorbing unsafe sink with index S.

    Attributes:
        kernel: (S, U, S + 1) row-stochastic transition probabilities, the last
            column is the probability of leaving the safe set into the sink.
        safe_states: (S,) bool, states belonging to X_S.
        rewards: (S, U) one-step rewards, zero when not given.
    """

    kernel: np.ndarray
    safe_states: np.ndarray
    rewards: np.ndarray | None = None

    def __post_init__(self):
        kernel = np.asarray(self.kernel, dtype=float)
        if kernel.ndim != 3 or kernel.shape[2] != kernel.shape[0] + 1:
            raise InvalidArgumentError(
                f"Kernel must have shape (S, U, S + 1), got {kernel.shape}."
            )
        if kernel.shape[0] < 2 or kernel.shape[1] < 1:
            raise InvalidArgumentError("A finite MDP needs at least 2 states and 1 action.")
        if np.any(kernel < 0.0) or np.any(np.abs(kernel.sum(axis=2) - 1.0) > 1e-12):
            raise InvalidArgumentError("Every kernel row must be a probability vector.")

        safe_states = np.asarray(self.safe_states, dtype=bool).reshape(-1)
        if safe_states.shape[0] != kernel.shape[0]:
            raise InvalidArgumentError(
                f"safe_states has {safe_states.shape[0]} entries for {kernel.shape[0]} states."
            )
        rewards = (
            np.zeros(kernel.shape[:2])
            if self.rewards is None
            else np.asarray(self.rewards, dtype=float)
        )
        if rewards.shape != kernel.shape[:2]:
            raise InvalidArgumentError(f"Rewards must have shape {kernel.shape[:2]}.")

        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "safe_states", safe_states)
        object.__setattr__(self, "rewards", rewards)

    @property
    def state_count(self) -> int:
        return self.kernel.shape[0]

    @property
    def action_count(self) -> int:
        return self.kernel.shape[1]

    @property
    def sink_index(self) -> int:
        return self.state_count

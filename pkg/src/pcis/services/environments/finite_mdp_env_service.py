"""
Finite MDP environment wrapper, sampling steps from a known kernel behind the same
interface as MountainCar.
"""

import numpy as np

from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.environment import EnvState
from src.pcis.core.schema.features import StateBox
from src.pcis.core.schema.mdp import FiniteMdpModel
from src.pcis.services.environments.base_environment import Environment
from src.pcis.services.oracle_service import OracleService


class FiniteMdpEnv(Environment):
    """
    States are 1-dimensional coordinates holding the state index; the unsafe sink has
    coordinate S. Entering the sink or an unsafe state sets unsafe_exit.
    """

    state_dimension = 1

    def __init__(self, model: FiniteMdpModel, rng: np.random.Generator):
        super().__init__(rng)
        self.model = model
        self.action_count = model.action_count
        self.safe_box = StateBox(lower=(0.0,), upper=(float(model.state_count - 1),))
        self._safe = np.flatnonzero(model.safe_states)
        if self._safe.size == 0:
            raise InvalidArgumentError("The finite MDP has no safe state to reset into.")

    def reset(self) -> EnvState:
        index = int(self.rng.choice(self._safe))
        self.state = np.array([float(index)])
        return EnvState(observation=self.state)

    def step(self, action: int) -> EnvState:
        if self.state is None:
            raise InvalidArgumentError("Call reset() before step().")
        if not 0 <= action < self.action_count:
            raise InvalidArgumentError(f"Action {action} outside [0, {self.action_count}).")

        current = int(round(self.state[0]))
        if current == self.model.sink_index:
            successor = current
        else:
            successor = int(
                OracleService.sample_next(
                    self.model, np.array([current]), np.array([action]), self.rng
                )[0]
            )
        unsafe = successor == self.model.sink_index or not self.model.safe_states[successor]
        sink = current == self.model.sink_index
        reward = 0.0 if sink else float(self.model.rewards[current, action])

        self.state = np.array([float(successor)])
        return EnvState(observation=self.state, reward=reward, unsafe_exit=unsafe)


def finite_env_wrap(model: FiniteMdpModel, seed: int | np.random.Generator) -> FiniteMdpEnv:
    """
    Wrap a finite MDP as an environment.
    :param model: The model.
    :param seed: Integer seed or an already derived random stream.
    :return: The environment instance.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return FiniteMdpEnv(model, rng)

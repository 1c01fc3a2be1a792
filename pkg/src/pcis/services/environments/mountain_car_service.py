"""
MountainCar Service Module containing the unclipped MountainCar dynamics

    v' = v + thrust_gain (u - 1) - gravity_gain cos(3 x)
    x' = x + v'

with environment-side clipping and resets disabled, so leaving the safe box is an
observable safety violation.
"""

import math

import numpy as np

from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.environment import EnvState, MountainCarConfig
from src.pcis.services.environments.base_environment import Environment

MOUNTAIN_CAR_ACTIONS = 3


def mc_step(state: np.ndarray, action: int, config: MountainCarConfig) -> EnvState:
    """
    Apply one step of the unclipped dynamics.
    :param state: (x, v).
    :param action: 0 push left, 1 no push, 2 push right.
    :param config: Dynamics and safe box.
    :return: The next state, reward -1 except 0 at the goal.
    """
    if not 0 <= action < MOUNTAIN_CAR_ACTIONS:
        raise InvalidArgumentError(f"MountainCar action {action} outside [0, 3).")

    position, velocity = float(state[0]), float(state[1])
    velocity = velocity + config.thrust_gain * (action - 1) - config.gravity_gain * math.cos(
        3.0 * position
    )
    position = position + velocity
    observation = np.array([position, velocity])

    terminal = position >= config.goal_position and velocity >= config.goal_min_velocity
    return EnvState(
        observation=observation,
        reward=0.0 if terminal else -1.0,
        terminal=terminal,
        unsafe_exit=not bool(config.safe_box.contains(observation)),
    )


def mc_reset(rng: np.random.Generator, config: MountainCarConfig) -> EnvState:
    """
    Draw x_0 uniformly from the initial position range with v_0 = init_velocity.
    """
    low, high = config.init_position_range
    position = float(rng.uniform(low, high))
    return EnvState(observation=np.array([position, config.init_velocity]))


class MountainCarEnv(Environment):
    """
    MountainCar instance behind the common stepping interface.
    """

    action_count = MOUNTAIN_CAR_ACTIONS
    state_dimension = 2

    def __init__(self, config: MountainCarConfig, rng: np.random.Generator):
        super().__init__(rng)
        self.config = config
        self.safe_box = config.safe_box

    def reset(self) -> EnvState:
        reset = mc_reset(self.rng, self.config)
        self.state = reset.observation
        return reset

    def step(self, action: int) -> EnvState:
        if self.state is None:
            raise InvalidArgumentError("Call reset() before step().")
        result = mc_step(self.state, action, self.config)
        self.state = result.observation
        return result

"""
Utils for pytest unit tests.
"""

import numpy as np

from src.pcis.constants import DatasetTag
from src.pcis.core.schema.mdp import FiniteMdpModel
from src.pcis.core.schema.transitions import TransitionDataset


def chain_model(stay: float, state_count: int = 2, action_count: int = 1) -> FiniteMdpModel:
    """
    Every state stays put with probability stay and falls into the sink otherwise.
    :param stay: Self-loop probability.
    :param state_count: Number of safe states.
    :param action_count: Number of (identical) actions.
    :return: The finite MDP.
    """
    kernel = np.zeros((state_count, action_count, state_count + 1))
    for state in range(state_count):
        kernel[state, :, state] = stay
        kernel[state, :, state_count] = 1.0 - stay
    return FiniteMdpModel(kernel=kernel, safe_states=np.ones(state_count, dtype=bool))


def four_state_model() -> FiniteMdpModel:
    """
    Fixed 4-state, 2-action fixture with wide margins around 1 - epsilon = 0.8 at N = 2:
        state 0: action 0 stays surely, action 1 exits          p_0 = 1
        state 1: both actions stay with probability 0.99        p_0 = 0.9801
        state 2: action 0 stays with probability 0.7            p_0 = 0.49
        state 3: both actions exit                              p_0 = 0
    """
    kernel = np.zeros((4, 2, 5))
    kernel[0, 0, 0] = 1.0
    kernel[0, 1, 4] = 1.0
    kernel[1, :, 1] = 0.99
    kernel[1, :, 4] = 0.01
    kernel[2, 0, 2] = 0.7
    kernel[2, 0, 4] = 0.3
    kernel[2, 1, 4] = 1.0
    kernel[3, :, 4] = 1.0
    return FiniteMdpModel(kernel=kernel, safe_states=np.ones(4, dtype=bool))


def closed_model(state_count: int = 3, action_count: int = 2) -> FiniteMdpModel:
    """
    Uniform transitions among the safe states, the sink is never reached.
    """
    kernel = np.zeros((state_count, action_count, state_count + 1))
    kernel[:, :, :state_count] = 1.0 / state_count
    return FiniteMdpModel(kernel=kernel, safe_states=np.ones(state_count, dtype=bool))


def falling_chain_model(state_count: int) -> FiniteMdpModel:
    """
    Single-action chain where state i moves to i - 1 and state 0 falls into the sink.
    Every pass of a safety operator at N = 1 removes the lowest remaining state.
    """
    kernel = np.zeros((state_count, 1, state_count + 1))
    kernel[0, 0, state_count] = 1.0
    for state in range(1, state_count):
        kernel[state, 0, state - 1] = 1.0
    return FiniteMdpModel(kernel=kernel, safe_states=np.ones(state_count, dtype=bool))


def mixing_model() -> FiniteMdpModel:
    """
    3-state, 2-action model that never reaches the sink. Action 0 follows an ergodic
    chain with a non-uniform stationary distribution, action 1 stays put.
    """
    kernel = np.zeros((3, 2, 4))
    kernel[:, 0, :3] = [[0.5, 0.3, 0.2], [0.1, 0.6, 0.3], [0.4, 0.2, 0.4]]
    kernel[:, 1, :3] = np.eye(3)
    return FiniteMdpModel(kernel=kernel, safe_states=np.ones(3, dtype=bool))


def make_dataset(
    states: list,
    actions: list[int],
    next_states: list,
    tag: DatasetTag = DatasetTag.BEHAVIOUR,
) -> TransitionDataset:
    """
    Build a dataset from plain lists, scalars are treated as 1-dimensional states.
    """
    states = np.asarray(states, dtype=float)
    next_states = np.asarray(next_states, dtype=float)
    if states.ndim == 1:
        states, next_states = states[:, None], next_states[:, None]
    return TransitionDataset(
        states=states, actions=np.asarray(actions), next_states=next_states, tag=tag
    )

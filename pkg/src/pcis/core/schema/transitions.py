"""
Module containing transitions and transition datasets.

Every transition carries a provenance tag; buffers refuse transitions whose tag does
not match so certification data can never be mixed into grow data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.pcis.constants import DatasetTag
from src.pcis.core.exceptions import DataSeparationError, InvalidArgumentError


@dataclass(frozen=True, eq=False)
class Transition:
    """
    A single executed environment step (x, u, r, x', terminal).
    """

    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool
    tag: DatasetTag


@dataclass(frozen=True, eq=False)
class TransitionDataset:
    """
    Ordered (x, u, x') triples in arrival order.

    Attributes:
        states: (T, n) array.
        actions: (T,) integer array.
        next_states: (T, n) array.
        tag: Provenance of every row.
    """

    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    tag: DatasetTag = DatasetTag.BEHAVIOUR

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        next_states = np.asarray(self.next_states, dtype=float)
        actions = np.asarray(self.actions, dtype=np.int64).reshape(-1)
        if states.ndim != 2 or next_states.shape != states.shape:
            raise InvalidArgumentError(
                f"states {states.shape} and next_states {next_states.shape} must be equal (T, n)."
            )
        if actions.shape[0] != states.shape[0]:
            raise InvalidArgumentError(
                f"{actions.shape[0]} actions given for {states.shape[0]} states."
            )
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "next_states", next_states)
        object.__setattr__(self, "actions", actions)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def state_dimension(self) -> int:
        return self.states.shape[1]

    @classmethod
    def empty(
        cls, state_dimension: int, tag: DatasetTag = DatasetTag.BEHAVIOUR
    ) -> TransitionDataset:
        return cls(
            states=np.zeros((0, state_dimension)),
            actions=np.zeros(0, dtype=np.int64),
            next_states=np.zeros((0, state_dimension)),
            tag=tag,
        )

    def slice(self, start: int, stop: int) -> TransitionDataset:
        """
        Contiguous block [start, stop) keeping the tag.
        """
        return TransitionDataset(
            states=self.states[start:stop],
            actions=self.actions[start:stop],
            next_states=self.next_states[start:stop],
            tag=self.tag,
        )


@dataclass
class TransitionBuffer:
    """
    Append-only accumulator for a single provenance tag, e.g. the cumulative grow dataset.
    """

    tag: DatasetTag
    state_dimension: int
    _states: list[np.ndarray] = field(default_factory=list)
    _actions: list[int] = field(default_factory=list)
    _next_states: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self._actions)

    def append(self, transition: Transition) -> None:
        """
        Append an executed transition.
        :param transition: The transition to store.
        :raises DataSeparationError: If the transition carries a different tag.
        """
        if transition.tag != self.tag:
            raise DataSeparationError(
                f"Refusing to store a '{transition.tag}' transition in a '{self.tag}' buffer."
            )
        self._states.append(np.asarray(transition.state, dtype=float))
        self._actions.append(int(transition.action))
        self._next_states.append(np.asarray(transition.next_state, dtype=float))

    def to_dataset(self) -> TransitionDataset:
        """Snapshot the buffer as an immutable dataset."""
        if not self._actions:
            return TransitionDataset.empty(self.state_dimension, self.tag)
        return TransitionDataset(
            states=np.stack(self._states),
            actions=np.asarray(self._actions, dtype=np.int64),
            next_states=np.stack(self._next_states),
            tag=self.tag,
        )

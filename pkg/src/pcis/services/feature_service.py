"""
Feature Service Module containing the state-action feature maps phi(x, u) used by the
conservative recursion: the Fourier construction for continuous states and the one-hot
tabular construction for finite MDPs.
"""

import itertools
import math
from abc import ABC, abstractmethod
from functools import cached_property

import numpy as np

from src.pcis.constants import FeatureKind
from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.config.config import FeatureModel
from src.pcis.core.schema.features import StateBox
from src.pcis.core.schema.lattice import LatticeGrid


class FeatureMap(ABC):
    """
    Base class for block-structured state-action feature maps phi(x, u) = e_u (x) psi(x).
    """

    kind: FeatureKind

    def __init__(self, action_count: int):
        if action_count < 1:
            raise InvalidArgumentError(f"Action count must be positive, got {action_count}.")
        self.action_count = action_count

    @property
    @abstractmethod
    def block_size(self) -> int:
        """Number of state features per action block."""

    @property
    @abstractmethod
    def state_dimension(self) -> int:
        """Dimension n of the states the map accepts."""

    @property
    @abstractmethod
    def lipschitz_bound(self) -> float:
        """L_phi such that |phi_l(x, u) - phi_l(x', u)| <= L_phi ||x - x'||_inf."""

    @property
    @abstractmethod
    def norm_bound(self) -> float:
        """Supremum of ||phi(x, u)||_2."""

    @abstractmethod
    def state_features(self, states: np.ndarray) -> np.ndarray:
        """
        State-only features psi.
        :param states: (T, n) array of states.
        :return: (T, block_size) array.
        """

    @property
    def dimension(self) -> int:
        return self.action_count * self.block_size

    def evaluate(self, state: np.ndarray, action: int) -> np.ndarray:
        """
        Evaluate phi at a single state-action pair.
        :param state: (n,) state.
        :param action: Action index.
        :return: (d,) feature vector.
        """
        state = np.asarray(state, dtype=float).reshape(1, -1)
        return self.evaluate_batch(state, np.array([action]))[0]

    def evaluate_batch(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """
        Evaluate phi row by row; only the block of each row's action is populated.
        :param states: (T, n) states.
        :param actions: (T,) action indices.
        :return: (T, d) feature rows.
        """
        states = np.asarray(states, dtype=float).reshape(-1, self.state_dimension)
        actions = np.asarray(actions, dtype=np.int64).reshape(-1)
        if actions.shape[0] != states.shape[0]:
            raise InvalidArgumentError(
                f"{actions.shape[0]} actions given for {states.shape[0]} states."
            )
        if np.any(actions < 0) or np.any(actions >= self.action_count):
            raise InvalidArgumentError(f"Action index outside [0, {self.action_count}).")

        psi = self.state_features(states)
        rows = np.arange(states.shape[0])[:, None]
        columns = actions[:, None] * self.block_size + np.arange(self.block_size)
        features = np.zeros((states.shape[0], self.dimension))
        features[rows, columns] = psi
        return features

    def lattice_features(self, grid: LatticeGrid) -> np.ndarray:
        """
        Features of every (lattice point, action) pair.
        :param grid: The lattice.
        :return: (size, |U|, d) array.
        """
        if grid.dimension != self.state_dimension:
            raise InvalidArgumentError(
                f"Lattice of dimension {grid.dimension} does not match "
                f"{self.state_dimension}-dimensional features."
            )
        psi = self.state_features(grid.points)
        features = np.zeros((grid.size, self.action_count, self.dimension))
        for action in range(self.action_count):
            start = action * self.block_size
            features[:, action, start : start + self.block_size] = psi
        return features


class FourierFeatureMap(FeatureMap):
    """
    Fourier cosine basis psi_c(s) = cos(pi c^T s_bar) over all c in {0..max_order}^n, where
    s_bar is the state rescaled from the box to [0, 1]^n. States outside the box are clamped
    before rescaling.

    With normalize on, every entry is scaled by 1 / sqrt((max_order + 1)^n) so that
    ||phi||_2 <= 1.
    """

    kind = FeatureKind.FOURIER

    def __init__(self, box: StateBox, action_count: int, max_order: int, normalize: bool = True):
        super().__init__(action_count)
        if max_order < 0:
            raise InvalidArgumentError(f"max_order must be nonnegative, got {max_order}.")
        self.box = box
        self.max_order = max_order
        self.normalize = normalize

    @cached_property
    def coefficients(self) -> np.ndarray:
        """(K, n) integer frequency vectors in lexicographic order."""
        grid = itertools.product(range(self.max_order + 1), repeat=self.box.dimension)
        return np.array(list(grid), dtype=float)

    @property
    def block_size(self) -> int:
        return self.coefficients.shape[0]

    @property
    def state_dimension(self) -> int:
        return self.box.dimension

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.block_size) if self.normalize else 1.0

    @property
    def lipschitz_bound(self) -> float:
        rates = math.pi * (self.coefficients / self.box.widths).sum(axis=1)
        return float(self.scale * rates.max())

    @property
    def norm_bound(self) -> float:
        return self.scale * math.sqrt(self.block_size)

    def state_features(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=float).reshape(-1, self.state_dimension)
        normalized = (self.box.clamp(states) - self.box.lower_array) / self.box.widths
        return self.scale * np.cos(math.pi * normalized @ self.coefficients.T)


class OneHotFeatureMap(FeatureMap):
    """
    One-hot encoding e_(x, u) over a finite state space. States are 1-dimensional
    coordinates holding the state index.
    """

    kind = FeatureKind.ONE_HOT_TABULAR

    def __init__(self, state_count: int, action_count: int):
        super().__init__(action_count)
        if state_count < 1:
            raise InvalidArgumentError(f"State count must be positive, got {state_count}.")
        self.state_count = state_count

    @property
    def block_size(self) -> int:
        return self.state_count

    @property
    def state_dimension(self) -> int:
        return 1

    @property
    def lipschitz_bound(self) -> float:
        return 0.0

    @property
    def norm_bound(self) -> float:
        return 1.0

    def state_indices(self, states: np.ndarray) -> np.ndarray:
        """
        Convert state coordinates to integer indices.
        :raises InvalidArgumentError: If an index is outside [0, state_count).
        """
        indices = np.rint(np.asarray(states, dtype=float).reshape(-1)).astype(np.int64)
        if np.any(indices < 0) or np.any(indices >= self.state_count):
            raise InvalidArgumentError(f"State index outside [0, {self.state_count}).")
        return indices

    def state_features(self, states: np.ndarray) -> np.ndarray:
        indices = self.state_indices(states)
        psi = np.zeros((indices.shape[0], self.state_count))
        psi[np.arange(indices.shape[0]), indices] = 1.0
        return psi


class FeatureService:
    """
    Feature Service used for building feature maps from the experiment config and for
    one-off feature evaluations.
    """

    @staticmethod
    def build_feature_map(
        features: FeatureModel,
        box: StateBox,
        action_count: int,
        state_count: int | None = None,
    ) -> FeatureMap:
        """
        Build the state-action feature map configured for an experiment.
        :param features: Feature section of the experiment config.
        :param box: Safe box the Fourier basis is normalized against.
        :param action_count: |U|.
        :param state_count: Number of states, required for tabular maps.
        :return: The feature map.
        """
        if features.kind == FeatureKind.ONE_HOT_TABULAR:
            if state_count is None:
                raise InvalidArgumentError("Tabular features need a state count.")
            return OneHotFeatureMap(state_count, action_count)
        return FourierFeatureMap(box, action_count, features.max_order, features.normalize)

    @staticmethod
    def fourier_feature(
        state: np.ndarray,
        action: int,
        box: StateBox,
        max_order: int,
        action_count: int = 3,
        normalize: bool = False,
    ) -> np.ndarray:
        """
        Evaluate the raw Fourier state-action feature at one pair.
        :return: (|U| (max_order + 1)^n,) feature vector.
        """
        return FourierFeatureMap(box, action_count, max_order, normalize).evaluate(state, action)

    @staticmethod
    def one_hot_feature(state: int, action: int, state_count: int, action_count: int) -> np.ndarray:
        """
        Unit coordinate vector of the pair (state, action), state-major within action blocks.
        :raises InvalidArgumentError: On out-of-range indices.
        """
        if not 0 <= action < action_count:
            raise InvalidArgumentError(f"Action {action} outside [0, {action_count}).")
        feature_map = OneHotFeatureMap(state_count, action_count)
        return feature_map.evaluate(np.array([state], dtype=float), action)

    @staticmethod
    def lipschitz_bound(feature_map: FeatureMap) -> float:
        return feature_map.lipschitz_bound

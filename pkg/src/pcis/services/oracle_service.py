"""
Oracle Service Module containing ground-truth computations on finite MDPs with a known
kernel: exact safety probabilities, the exact safety operator, the maximal PCIS and a
seeded sampler of transitions and random models.
"""

import numpy as np

from src.pcis.constants import DatasetTag
from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.logger import logger
from src.pcis.core.schema.config.config import FiniteMdpSpecModel
from src.pcis.core.schema.lattice import LatticeGrid, LatticeMask
from src.pcis.core.schema.mdp import FiniteMdpModel
from src.pcis.core.schema.transitions import TransitionDataset


class OracleService:
    """
    Oracle Service used to check data-driven sets against exact dynamic programming.
    State subsets are (S,) boolean arrays; the sink never belongs to a subset.
    """

    @staticmethod
    def exact_dp_table(model: FiniteMdpModel, omega: np.ndarray, horizon: int) -> np.ndarray:
        """
        Exact backward recursion p_N = 1_omega, p_j = 1_omega max_u E[p_{j+1}(x') | x, u].
        :param model: The finite MDP.
        :param omega: (S,) bool reference set, a subset of the safe states.
        :param horizon: N >= 1.
        :return: (N + 1, S) values, row j holds stage j.
        """
        omega = OracleService._check_subset(model, omega)
        if horizon < 1:
            raise InvalidArgumentError(f"Horizon must be positive, got {horizon}.")

        indicator = omega.astype(float)
        safe_kernel = model.kernel[:, :, : model.state_count]
        values = np.zeros((horizon + 1, model.state_count))
        values[horizon] = indicator
        for j in range(horizon - 1, -1, -1):
            values[j] = indicator * (safe_kernel @ values[j + 1]).max(axis=1)
        return values

    @classmethod
    def exact_dp(cls, model: FiniteMdpModel, omega: np.ndarray, horizon: int) -> np.ndarray:
        """
        Maximal N-step probability of staying in omega, p_0(x), per state.
        """
        return cls.exact_dp_table(model, omega, horizon)[0]

    @classmethod
    def exact_q_operator(
        cls, model: FiniteMdpModel, omega: np.ndarray, horizon: int, epsilon: float
    ) -> np.ndarray:
        """
        Exact safety operator {x in omega : p_0(x) >= 1 - epsilon}.
        :return: (S,) bool subset of omega.
        """
        omega = cls._check_subset(model, omega)
        return omega & (cls.exact_dp(model, omega, horizon) >= 1.0 - epsilon)

    @classmethod
    def maximal_pcis(cls, model: FiniteMdpModel, horizon: int, epsilon: float) -> np.ndarray:
        """
        Iterate the exact operator from the safe states until it stabilizes.
        :return: (S,) bool fixed point, possibly empty.
        """
        omega = model.safe_states.copy()
        for _ in range(model.state_count + 1):
            image = cls.exact_q_operator(model, omega, horizon, epsilon)
            if np.array_equal(image, omega):
                break
            omega = image

        if not np.array_equal(cls.exact_q_operator(model, omega, horizon, epsilon), omega):
            raise AssertionError("Maximal PCIS iteration ended on a set that is not a fixed point.")
        logger.debug(
            "[Oracle]: Maximal PCIS holds %d of %d states.", omega.sum(), model.state_count
        )
        return omega

    @staticmethod
    def sample_transitions(
        model: FiniteMdpModel,
        count: int,
        rng: np.random.Generator,
        tag: DatasetTag = DatasetTag.BEHAVIOUR,
    ) -> TransitionDataset:
        """
        One-step samples from uniform safe states under a uniform-random action policy.
        :param model: The finite MDP.
        :param count: Number of transitions.
        :param rng: Random stream.
        :param tag: Provenance tag of the dataset.
        :return: Dataset with 1-dimensional state coordinates, the sink at coordinate S.
        """
        if count < 0:
            raise InvalidArgumentError(f"Sample count must be nonnegative, got {count}.")
        safe = np.flatnonzero(model.safe_states)
        if count == 0 or safe.size == 0:
            return TransitionDataset.empty(1, tag)

        states = rng.choice(safe, size=count)
        actions = rng.integers(model.action_count, size=count)
        next_states = OracleService.sample_next(model, states, actions, rng)
        return TransitionDataset(
            states=states[:, None].astype(float),
            actions=actions,
            next_states=next_states[:, None].astype(float),
            tag=tag,
        )

    @staticmethod
    def sample_next(
        model: FiniteMdpModel, states: np.ndarray, actions: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        """
        Draw successor indices in {0..S} by inverse-CDF sampling of the kernel rows.
        """
        cdf = np.cumsum(model.kernel[states, actions], axis=-1)
        draws = rng.random(np.shape(states))
        successors = (draws[..., None] >= cdf).sum(axis=-1)
        return np.minimum(successors, model.sink_index)

    @staticmethod
    def random_model(spec: FiniteMdpSpecModel, rng: np.random.Generator) -> FiniteMdpModel:
        """
        Draw a random finite MDP: Dirichlet rows with the configured concentration, and a
        fraction of near-deterministic rows concentrated on one successor (the sink with
        probability exit_bias).
        :param spec: Generator settings.
        :param rng: Random stream.
        :return: A model whose states are all safe.
        """
        states, actions = spec.state_count, spec.action_count
        outcomes = states + 1
        kernel = rng.dirichlet(np.full(outcomes, spec.concentration), size=(states, actions))

        near_deterministic = rng.random((states, actions)) < spec.near_deterministic_fraction
        for s, u in zip(*np.nonzero(near_deterministic), strict=True):
            target = states if rng.random() < spec.exit_bias else int(rng.integers(states))
            spread = rng.uniform(0.0, 0.05)
            row = spread * rng.dirichlet(np.full(outcomes, spec.concentration))
            row[target] += 1.0 - spread
            kernel[s, u] = row

        kernel /= kernel.sum(axis=2, keepdims=True)
        return FiniteMdpModel(kernel=kernel, safe_states=np.ones(states, dtype=bool))

    @staticmethod
    def to_lattice_mask(grid: LatticeGrid, subset: np.ndarray) -> LatticeMask:
        """
        Lattice mask of a state subset on the tabular grid of the same model.
        """
        return LatticeMask(grid=grid, bits=np.asarray(subset, dtype=bool))

    @staticmethod
    def _check_subset(model: FiniteMdpModel, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=bool).reshape(-1)
        if omega.shape[0] != model.state_count:
            raise InvalidArgumentError(
                f"Subset has {omega.shape[0]} entries for {model.state_count} states."
            )
        if np.any(omega & ~model.safe_states):
            raise InvalidArgumentError("The reference set must be a subset of the safe states.")
        return omega

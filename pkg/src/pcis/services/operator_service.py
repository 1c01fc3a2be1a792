"""
Operator Service Module containing the conservative backward recursion over a lattice,
the set-valued safe-action maps it induces, the ConInv fixed-point search and the
hold-out certification of a tentative shield.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from src.pcis.constants import FeatureKind
from src.pcis.core.exceptions import GridMismatchError, InvalidArgumentError
from src.pcis.core.logger import logger
from src.pcis.core.schema.lattice import LatticeGrid, LatticeMask, SafetyValueTable
from src.pcis.core.schema.operator import CertificationOutcome, OperatorResult
from src.pcis.core.schema.ridge import ConfidenceParams, RidgeStage
from src.pcis.core.schema.transitions import TransitionDataset
from src.pcis.services.feature_service import FeatureMap
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.ridge_service import RidgeService


@dataclass
class _BlockCache:
    """
    Target-independent state of one stage block: its design rows, the absorbed Gram
    matrix and the lattice widths computed so far (NaN where not yet needed).
    """

    features: np.ndarray
    stage: RidgeStage
    widths: np.ndarray
    next_states: np.ndarray


class PcisOperatorService:
    """
    Conservative operator Q~ on a fixed lattice, feature map and confidence parameters.

    For every stage j = N-1 .. 0 the service regresses the lifted stage-(j+1) values on
    the stage-j data block and evaluates the lower bound

        l_j(x_d, u) = theta_hat_j^T phi(x_d, u) - d L_phi delta_x - beta_j sigma_j(x_d, u)

    at the lattice points of the reference set only. Values outside the reference set
    are 0 by definition.
    """

    def __init__(
        self,
        feature_map: FeatureMap,
        grid: LatticeGrid,
        params: ConfidenceParams,
        ridge_service: RidgeService | None = None,
    ):
        """
        Constructor for the operator service.
        :param feature_map: State-action features phi.
        :param grid: Lattice over the safe box.
        :param params: Tolerance, confidence and width settings.
        :param ridge_service: Regression engine, a default one when omitted.
        :raises InvalidArgumentError: If features and lattice disagree on the state dimension.
        """
        if feature_map.state_dimension != grid.dimension:
            raise InvalidArgumentError(
                f"Feature map expects {feature_map.state_dimension}-dimensional states but the "
                f"lattice is {grid.dimension}-dimensional."
            )
        self.feature_map = feature_map
        self.grid = grid
        self.params = params
        self.ridge_service = ridge_service or RidgeService()
        self._lattice_features: np.ndarray | None = None

    @property
    def discretization_penalty(self) -> float:
        """penalty_scale * d * L_phi * delta_x, zero for tabular maps."""
        return (
            self.params.penalty_scale
            * self.feature_map.dimension
            * self.feature_map.lipschitz_bound
            * self.grid.delta_x
        )

    @property
    def lattice_features(self) -> np.ndarray:
        """(size, |U|, d) features of every lattice point and action, built once."""
        if self._lattice_features is None:
            self._lattice_features = self.feature_map.lattice_features(self.grid)
        return self._lattice_features

    @staticmethod
    def split_stagewise(dataset: TransitionDataset, horizon: int) -> list[TransitionDataset]:
        """
        Split a dataset into N contiguous blocks in arrival order, sizes differing by at most
        one with the larger blocks first, e.g. 7 samples and N = 3 give (3, 2, 2).
        :param dataset: The transitions.
        :param horizon: N >= 1.
        :return: N disjoint blocks covering the dataset.
        """
        if horizon < 1:
            raise InvalidArgumentError(f"Horizon must be positive, got {horizon}.")

        base, remainder = divmod(len(dataset), horizon)
        blocks, start = [], 0
        for j in range(horizon):
            stop = start + base + (1 if j < remainder else 0)
            blocks.append(dataset.slice(start, stop))
            start = stop

        short = [j for j, block in enumerate(blocks) if len(block) == 0]
        if short:
            logger.warning(
                "[Operator]: %d samples for horizon %d, stage blocks %s are empty.",
                len(dataset),
                horizon,
                short,
            )
        return blocks

    def conservative_operator(
        self, omega: LatticeMask, data_blocks: list[TransitionDataset]
    ) -> OperatorResult:
        """
        Evaluate Q~(omega) with the lattice penalty.
        :param omega: Reference set.
        :param data_blocks: One block per backward stage, block j feeds stage j.
        :return: The operator result.
        """
        return self._evaluate(omega, self._block_caches(data_blocks), self.discretization_penalty)

    def operator_exact_variant(
        self, omega: LatticeMask, data_blocks: list[TransitionDataset]
    ) -> OperatorResult:
        """
        Evaluate the finite-state operator: identical pipeline with zero discretization penalty.
        :raises InvalidArgumentError: If the feature map is not tabular.
        """
        if self.feature_map.kind != FeatureKind.ONE_HOT_TABULAR:
            raise InvalidArgumentError(
                "The exact operator variant requires one-hot tabular features."
            )
        return self._evaluate(omega, self._block_caches(data_blocks), 0.0)

    def safe_actions(self, result: OperatorResult, stage: int, state: np.ndarray) -> set[int]:
        """
        Look up the stage-j safe-action set at the quantized state. May be empty.
        :param result: A previous operator evaluation.
        :param stage: j in {0..N-1}.
        :param state: Continuous state.
        :return: Set of action indices.
        """
        if not 0 <= stage < result.horizon:
            raise InvalidArgumentError(f"Stage {stage} outside [0, {result.horizon}).")
        index = LatticeService.quantize(self.grid, np.asarray(state, dtype=float).reshape(-1))
        return {int(u) for u in np.flatnonzero(result.action_sets[stage, index])}

    def con_inv(
        self,
        dataset: TransitionDataset,
        safe_mask: LatticeMask,
        trace: list[LatticeMask] | None = None,
    ) -> tuple[LatticeMask, OperatorResult]:
        """
        Iterate Omega <- Q~(Omega) from the safe set until the mask stops changing.
        The stage blocks and their Gram matrices are shared across iterations.
        :param dataset: Grow data, split stagewise once.
        :param safe_mask: Starting set, usually the whole safe lattice.
        :param trace: When given, every iterate (starting with safe_mask) is appended to it.
        :return: The conservative fixed point (possibly empty) and its operator result.
        """
        self._check_grid(safe_mask)
        caches = self._block_caches(self.split_stagewise(dataset, self.params.horizon))
        penalty = self.discretization_penalty

        omega = safe_mask
        if trace is not None:
            trace.append(omega)

        for iteration in range(1, self.grid.size + 2):
            result = self._evaluate(omega, caches, penalty)
            if result.q_set.equals(omega):
                logger.info(
                    "[ConInv]: Fixed point with %d of %d lattice points after %d iteration(s).",
                    omega.count,
                    self.grid.size,
                    iteration,
                )
                return omega, result
            omega = result.q_set
            if trace is not None:
                trace.append(omega)
            logger.debug("[ConInv]: Iteration %d kept %d points.", iteration, omega.count)

        # Iterates strictly shrink until they stop, so the loop above always returns.
        raise AssertionError("ConInv did not reach a fixed point within |lattice| + 1 iterations.")

    def certify_shield(
        self, cert_dataset: TransitionDataset, omega_tent: LatticeMask
    ) -> CertificationOutcome:
        """
        Single operator evaluation on the fixed tentative set using certification data.
        :param cert_dataset: Data collected independently of the data behind omega_tent.
        :param omega_tent: Tentative shield set.
        :return: Accepted iff omega_tent is contained in its certified image.
        """
        self._check_grid(omega_tent)
        result = self.conservative_operator(
            omega_tent, self.split_stagewise(cert_dataset, self.params.horizon)
        )
        accepted = omega_tent.is_subset_of(result.q_set)
        logger.info(
            "[Certify]: %s tentative set of %d points (%d certified, %d samples).",
            "Accepted" if accepted else "Rejected",
            omega_tent.count,
            result.q_set.count,
            len(cert_dataset),
        )
        return CertificationOutcome(
            accepted=accepted, omega_tent=omega_tent, cert_set=result.q_set, result=result
        )

    def _block_caches(self, data_blocks: list[TransitionDataset]) -> list[_BlockCache]:
        if len(data_blocks) != self.params.horizon:
            raise InvalidArgumentError(
                f"{len(data_blocks)} data blocks given for horizon {self.params.horizon}."
            )
        caches = []
        for block in data_blocks:
            if len(block) and block.state_dimension != self.grid.dimension:
                raise InvalidArgumentError(
                    f"Data of dimension {block.state_dimension} does not match the "
                    f"{self.grid.dimension}-dimensional lattice."
                )
            features = self.feature_map.evaluate_batch(block.states, block.actions)
            stage = self.ridge_service.init_stage(
                self.feature_map.dimension, self.params.ridge_lambda
            )
            stage = self.ridge_service.fit(stage, features, np.zeros(len(block)))
            widths = np.full((self.grid.size, self.feature_map.action_count), np.nan)
            caches.append(
                _BlockCache(
                    features=features,
                    stage=stage,
                    widths=widths,
                    next_states=block.next_states.reshape(-1, self.grid.dimension),
                )
            )
        return caches

    def _evaluate(
        self, omega: LatticeMask, caches: list[_BlockCache], penalty: float
    ) -> OperatorResult:
        self._check_grid(omega)
        horizon = self.params.horizon
        size, action_count = self.grid.size, self.feature_map.action_count
        threshold = self.params.threshold

        values = np.zeros((horizon + 1, size))
        values[horizon] = omega.bits.astype(float)
        lower_bounds = np.full((horizon, size, action_count), -np.inf)
        action_sets = np.zeros((horizon, size, action_count), dtype=bool)
        continuation = np.zeros((horizon, size), dtype=np.int64)
        stages: list[RidgeStage] = [None] * horizon
        members = omega.indices

        for j in range(horizon - 1, -1, -1):
            cache = caches[j]
            targets = LatticeService.lift_values(values[j + 1], omega, cache.next_states)
            stage = self.ridge_service.retarget(cache.stage, cache.features, targets)

            if self.params.beta_override is not None:
                beta = self.params.beta_override
            else:
                beta = self.ridge_service.beta_default(
                    self.params, j, stage.sample_count, stage.ridge_lambda, stage.dimension
                )
            stage = dataclasses.replace(stage, beta=beta)
            stages[j] = stage

            if members.size == 0:
                continue
            widths = self._lattice_widths(cache, members)
            features = self.lattice_features[members]
            ell = features @ stage.theta_hat - penalty - beta * widths
            clipped = np.clip(ell, 0.0, 1.0)

            lower_bounds[j, members] = ell
            values[j, members] = clipped.max(axis=1)
            action_sets[j, members] = clipped >= threshold
            continuation[j, members] = np.argmax(ell, axis=1)
            logger.debug(
                "[Operator]: Stage %d, T=%d, beta=%.4g, max value %.4g.",
                j,
                stage.sample_count,
                beta,
                values[j, members].max(),
            )

        q_bits = omega.bits & (values[0] >= threshold)
        short_blocks = [j for j, cache in enumerate(caches) if cache.stage.sample_count == 0]
        return OperatorResult(
            omega=omega,
            q_set=LatticeMask(grid=self.grid, bits=q_bits),
            value_table=SafetyValueTable(grid=self.grid, values=values),
            lower_bounds=lower_bounds,
            action_sets=action_sets,
            continuation=continuation,
            stages=stages,
            epsilon=self.params.epsilon,
            short_blocks=short_blocks,
        )

    def _lattice_widths(self, cache: _BlockCache, members: np.ndarray) -> np.ndarray:
        missing = members[np.isnan(cache.widths[members, 0])]
        if missing.size:
            rows = self.lattice_features[missing].reshape(-1, self.feature_map.dimension)
            cache.widths[missing] = self.ridge_service.sigmas(cache.stage, rows).reshape(
                missing.size, self.feature_map.action_count
            )
        return cache.widths[members]

    def _check_grid(self, mask: LatticeMask) -> None:
        if not mask.grid.same_as(self.grid):
            raise GridMismatchError("The reference set was built on a different lattice.")

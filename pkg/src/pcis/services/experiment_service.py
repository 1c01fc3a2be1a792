"""
Experiment Service Module assembling the services of one experiment from its validated
configuration: model, lattice, features, operator, environments, learners and shields.
"""

from functools import cached_property

import numpy as np

from src.pcis.constants import (
    CertificationPolicyKind,
    DatasetTag,
    EnvironmentKind,
    LearnerKind,
    RngStream,
)
from src.pcis.core.schema.config.config import ExperimentModel
from src.pcis.core.schema.features import StateBox
from src.pcis.core.schema.lattice import LatticeGrid, LatticeMask
from src.pcis.core.schema.mdp import FiniteMdpModel
from src.pcis.core.schema.shield import ShieldState
from src.pcis.core.schema.transitions import TransitionDataset
from src.pcis.services.environments.base_environment import Environment
from src.pcis.services.environments.finite_mdp_env_service import finite_env_wrap
from src.pcis.services.environments.mountain_car_service import MOUNTAIN_CAR_ACTIONS, MountainCarEnv
from src.pcis.services.feature_service import FeatureMap, FeatureService, FourierFeatureMap
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.learners.base_learner import ProposalLearner
from src.pcis.services.learners.q_learning_service import TabularQLearner
from src.pcis.services.learners.sarsa_service import TrueOnlineSarsaLearner
from src.pcis.services.operator_service import PcisOperatorService
from src.pcis.services.oracle_service import OracleService
from src.pcis.services.rng_service import RngService
from src.pcis.services.shield.shield_service import ShieldService
from src.pcis.services.shield.training_service import CertificationPolicy, TrainingService


class ExperimentService:
    """
    Experiment Service used by the CLI tasks to build everything an experiment needs.
    Finite MDPs are represented on a 1-dimensional tabular lattice.
    """

    def __init__(self, experiment: ExperimentModel):
        """
        Constructor for the experiment service.
        :param experiment: Validated experiment configuration.
        """
        self.experiment = experiment

    @property
    def is_finite(self) -> bool:
        return self.experiment.environment.kind == EnvironmentKind.FINITE_MDP

    @cached_property
    def model(self) -> FiniteMdpModel | None:
        """The finite MDP drawn from environment.finite_mdp, None for MountainCar."""
        if not self.is_finite:
            return None
        spec = self.experiment.environment.finite_mdp
        rng = RngService(spec.model_seed).stream(RngStream.MODEL)
        return OracleService.random_model(spec, rng)

    @property
    def action_count(self) -> int:
        return self.model.action_count if self.is_finite else MOUNTAIN_CAR_ACTIONS

    @cached_property
    def grid(self) -> LatticeGrid:
        if self.is_finite:
            return LatticeService.tabular_grid(self.model.state_count)
        return LatticeService.build_grid(
            self.experiment.safe_box, self.experiment.grid.points_per_axis
        )

    @property
    def safe_box(self) -> StateBox:
        return self.grid.box

    @cached_property
    def safe_mask(self) -> LatticeMask:
        if self.is_finite:
            return LatticeMask(grid=self.grid, bits=self.model.safe_states)
        return LatticeMask.full(self.grid)

    @cached_property
    def feature_map(self) -> FeatureMap:
        return FeatureService.build_feature_map(
            self.experiment.features,
            self.safe_box,
            self.action_count,
            state_count=self.model.state_count if self.is_finite else None,
        )

    @cached_property
    def operator_service(self) -> PcisOperatorService:
        return PcisOperatorService(self.feature_map, self.grid, self.experiment.confidence)

    def environment(self, rng: np.random.Generator) -> Environment:
        """
        Fresh environment instance on the given stream.
        """
        if self.is_finite:
            return finite_env_wrap(self.model, rng)
        return MountainCarEnv(self.experiment.environment.mountain_car, rng)

    def learner(self) -> ProposalLearner:
        """
        Fresh proposal learner as configured.
        """
        config = self.experiment.learner
        if config.kind == LearnerKind.Q_LEARNING:
            return TabularQLearner(
                state_count=self.model.state_count,
                action_count=self.action_count,
                exploration=config.exploration,
                alpha=config.alpha,
                gamma=config.gamma,
            )
        basis = FourierFeatureMap(
            self.safe_box, self.action_count, config.max_order, normalize=False
        )
        return TrueOnlineSarsaLearner(
            state_features=basis.state_features,
            feature_count=basis.block_size,
            action_count=self.action_count,
            exploration=config.exploration,
            alpha=config.alpha,
            gamma=config.gamma,
            lambda_trace=config.lambda_trace,
        )

    def seed_shield(self) -> ShieldState:
        return ShieldService.seed_shield(
            self.grid,
            self.experiment.shield.seed,
            self.safe_mask,
            self.action_count,
            self.experiment.confidence.horizon,
        )

    def training_service(self) -> TrainingService:
        return TrainingService(
            operator_service=self.operator_service,
            safe_mask=self.safe_mask,
            schedule=self.experiment.schedule,
            shield_config=self.experiment.shield,
            environment_factory=self.environment,
        )

    def sample_behaviour_data(
        self,
        count: int,
        rng: np.random.Generator,
        tag: DatasetTag = DatasetTag.BEHAVIOUR,
    ) -> TransitionDataset:
        """
        Transitions under a uniform-random policy: one-step kernel samples for finite MDPs,
        uniform-action rollouts from resets for MountainCar.
        """
        if self.is_finite:
            return OracleService.sample_transitions(self.model, count, rng, tag)
        policy = CertificationPolicy(CertificationPolicyKind.UNIFORM, self.action_count)
        return self.training_service().collect_rollouts(
            self.environment(rng), policy, count, rng, tag
        )

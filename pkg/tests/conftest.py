"""
Pytest conftest.py module containing shared lattices, models, configurations and
experiment fixtures.
"""

import numpy as np
import pytest

from src.pcis.constants import (
    EnvironmentKind,
    FeatureKind,
    LearnerKind,
    ScheduleKind,
    SeedActionRule,
    SeedShieldKind,
)
from src.pcis.core.schema.config.config import (
    EnvironmentModel,
    ExperimentModel,
    ExplorationModel,
    FeatureModel,
    FiniteMdpSpecModel,
    LearnerModel,
    ScheduleModel,
    SeedShieldModel,
    ShieldModel,
    VerifyModel,
)
from src.pcis.core.schema.environment import MOUNTAIN_CAR_SAFE_BOX, MountainCarConfig
from src.pcis.core.schema.lattice import LatticeGrid
from src.pcis.core.schema.ridge import ConfidenceParams
from src.pcis.services.lattice_service import LatticeService
from tests.utils import four_state_model


@pytest.fixture
def rng() -> np.random.Generator:
    """
    Fixture providing a fixed-seed random stream.
    """
    return np.random.default_rng(1234)


@pytest.fixture
def mc_config() -> MountainCarConfig:
    return MountainCarConfig()


@pytest.fixture
def mc_grid() -> LatticeGrid:
    """
    Fixture containing the 200 x 30 MountainCar safe-box lattice.
    """
    return LatticeService.build_grid(MOUNTAIN_CAR_SAFE_BOX, (200, 30))


@pytest.fixture
def exploration() -> ExplorationModel:
    return ExplorationModel(
        kind=ScheduleKind.EXPONENTIAL, eps_max=1.0, eps_min=0.01, tau_or_span=1000
    )


@pytest.fixture
def fixture_model():
    """
    Fixture containing the 4-state oracle fixture (exact Q = {0, 1} at epsilon 0.2, N = 2).
    """
    return four_state_model()


@pytest.fixture
def fixture_params() -> ConfidenceParams:
    return ConfidenceParams(epsilon=0.2, eta=0.9, horizon=2)


@pytest.fixture
def finite_experiment() -> ExperimentModel:
    """
    Fixture containing a small finite-MDP experiment that runs in well under a second.
    """
    return ExperimentModel(
        name="finite_test",
        environment=EnvironmentModel(
            kind=EnvironmentKind.FINITE_MDP,
            finite_mdp=FiniteMdpSpecModel(state_count=4, action_count=2, model_seed=3),
        ),
        features=FeatureModel(kind=FeatureKind.ONE_HOT_TABULAR),
        confidence=ConfidenceParams(epsilon=0.2, eta=0.9, horizon=2),
        learner=LearnerModel(
            kind=LearnerKind.Q_LEARNING,
            alpha=0.1,
            exploration=ExplorationModel(
                kind=ScheduleKind.EXPONENTIAL, eps_max=1.0, eps_min=0.01, tau_or_span=100
            ),
        ),
        schedule=ScheduleModel(
            t_grow=100,
            t_cert=400,
            interval_budget=3,
            step_budget=300,
            cert_episode_length=20,
            stop_on_goal=False,
        ),
        shield=ShieldModel(
            seed=SeedShieldModel(kind=SeedShieldKind.FULL_LATTICE, action_rule=SeedActionRule.ALL)
        ),
        seeds=(0, 1),
        verify=VerifyModel(trials=5, samples_per_stage=500, seed=7),
    )

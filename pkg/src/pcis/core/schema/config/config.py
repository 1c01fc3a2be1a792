from __future__ import annotations

from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.pcis.constants import (
    CertificationPolicyKind,
    EnvironmentKind,
    FeatureKind,
    LearnerKind,
    ScheduleKind,
    SeedActionRule,
    SeedShieldKind,
)
from src.pcis.core.schema.environment import MOUNTAIN_CAR_SAFE_BOX, MountainCarConfig
from src.pcis.core.schema.features import StateBox
from src.pcis.core.schema.ridge import ConfidenceParams


class StrictModel(BaseModel):
    """Base for every experiment config section: unknown keys are rejected."""

    model_config = ConfigDict(frozen=True, extra="forbid")


class FiniteMdpSpecModel(StrictModel):
    """
    Random finite MDP drawn by the oracle generator.
    """

    state_count: int = Field(4, ge=2)
    action_count: int = Field(2, ge=1)
    concentration: float = Field(1.0, gt=0.0)
    near_deterministic_fraction: float = Field(0.5, ge=0.0, le=1.0)
    exit_bias: float = Field(0.2, ge=0.0, le=1.0)
    model_seed: int = 0


class EnvironmentModel(StrictModel):
    kind: EnvironmentKind = EnvironmentKind.MOUNTAIN_CAR
    mountain_car: MountainCarConfig = MountainCarConfig()
    finite_mdp: FiniteMdpSpecModel = FiniteMdpSpecModel()


class FeatureModel(StrictModel):
    kind: FeatureKind = FeatureKind.FOURIER
    max_order: int = Field(5, ge=0)
    normalize: bool = True


class GridModel(StrictModel):
    points_per_axis: tuple[int, ...] = (200, 30)


class ExplorationModel(StrictModel):
    kind: ScheduleKind = ScheduleKind.LINEAR
    eps_max: float = Field(0.5, ge=0.0, le=1.0)
    eps_min: float = Field(0.01, ge=0.0, le=1.0)
    tau_or_span: float = Field(4000.0, gt=0.0)

    @model_validator(mode="after")
    def validate_range(self) -> ExplorationModel:
        if self.eps_min > self.eps_max:
            raise ValueError("eps_min must not exceed eps_max.")
        return self


class LearnerModel(StrictModel):
    kind: LearnerKind = LearnerKind.SARSA
    alpha: float = Field(1e-3, ge=0.0)
    gamma: float = Field(0.99, ge=0.0, le=1.0)
    lambda_trace: float = Field(0.9, ge=0.0, le=1.0)
    max_order: int = Field(5, ge=0)
    exploration: ExplorationModel = ExplorationModel()


class ScheduleModel(StrictModel):
    t_grow: int = Field(300, ge=1)
    t_cert: int = Field(300, ge=0)
    interval_budget: int = Field(100, ge=0)
    step_budget: int = Field(4000, ge=0)
    cert_episode_length: int = Field(100, ge=1)
    stop_on_goal: bool = True


class SeedShieldModel(StrictModel):
    kind: SeedShieldKind = SeedShieldKind.BOX
    lower: tuple[float, ...] | None = (-0.7, -0.02)
    upper: tuple[float, ...] | None = (-0.3, 0.02)
    action_rule: SeedActionRule = SeedActionRule.STOP_PRESERVING

    @model_validator(mode="after")
    def validate_box(self) -> SeedShieldModel:
        if self.kind == SeedShieldKind.BOX and (self.lower is None or self.upper is None):
            raise ValueError("A box seed shield needs both 'lower' and 'upper'.")
        return self


class ShieldModel(StrictModel):
    enabled: bool = True
    monotone_guard: bool = True
    seed: SeedShieldModel = SeedShieldModel()
    certification_policy: CertificationPolicyKind = CertificationPolicyKind.TENTATIVE_SAFE_UNIFORM


class VerifyModel(StrictModel):
    """
    Monte Carlo conservatism suite run by the 'verify' command.
    """

    trials: int = Field(300, ge=0)
    min_states: int = Field(2, ge=2)
    max_states: int = Field(6, ge=2)
    max_actions: int = Field(3, ge=1)
    horizons: tuple[int, ...] = (1, 2, 3)
    eta: float = Field(0.9, gt=0.0, lt=1.0)
    epsilon: float = Field(0.2, gt=0.0, lt=1.0)
    samples_per_stage: int = Field(4000, ge=0)
    sigmas: float = Field(3.0, ge=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def validate_sizes(self) -> VerifyModel:
        if self.min_states > self.max_states:
            raise ValueError("min_states must not exceed max_states.")
        if not self.horizons or any(h < 1 for h in self.horizons):
            raise ValueError("horizons must be a nonempty list of positive integers.")
        return self


class ExperimentModel(StrictModel):
    """
    A complete experiment: environment, abstraction, confidence, learner, schedule and seeds.
    """

    name: str = "experiment"
    environment: EnvironmentModel = EnvironmentModel()
    safe_box: StateBox = MOUNTAIN_CAR_SAFE_BOX
    features: FeatureModel = FeatureModel()
    grid: GridModel = GridModel()
    confidence: ConfidenceParams = ConfidenceParams()
    learner: LearnerModel = LearnerModel()
    schedule: ScheduleModel = ScheduleModel()
    shield: ShieldModel = ShieldModel()
    seeds: tuple[int, ...] = (0,)
    verify: VerifyModel = VerifyModel()

    @model_validator(mode="after")
    def validate_consistency(self) -> ExperimentModel:
        """
        Cross-section checks that only make sense on the whole experiment.
        :return: The validated experiment.
        :raises: ValueError on inconsistent sections.
        """
        if self.environment.kind == EnvironmentKind.FINITE_MDP:
            if self.features.kind != FeatureKind.ONE_HOT_TABULAR:
                raise ValueError("finite_mdp environments require one_hot_tabular features.")
            if self.learner.kind != LearnerKind.Q_LEARNING:
                raise ValueError("finite_mdp environments require the q_learning learner.")
            seed = self.shield.seed
            if seed.action_rule == SeedActionRule.STOP_PRESERVING:
                raise ValueError("finite_mdp seed shields must use the 'all' action rule.")
            if seed.kind == SeedShieldKind.BOX and len(seed.lower) != 1:
                raise ValueError("finite_mdp seed boxes are 1-dimensional state index ranges.")
        else:
            if self.features.kind != FeatureKind.FOURIER:
                raise ValueError("mountain_car environments require fourier features.")
            if self.learner.kind != LearnerKind.SARSA:
                raise ValueError("mountain_car environments require the sarsa learner.")
            if len(self.grid.points_per_axis) != self.safe_box.dimension:
                raise ValueError(
                    f"grid.points_per_axis has {len(self.grid.points_per_axis)} entries for a "
                    f"{self.safe_box.dimension}-dimensional safe box."
                )
            if self.environment.mountain_car.safe_box != self.safe_box:
                raise ValueError("environment.mountain_car.safe_box must equal safe_box.")
            if any(points < 2 for points in self.grid.points_per_axis):
                raise ValueError("Every grid axis needs at least 2 points.")
            seed = self.shield.seed
            if seed.kind == SeedShieldKind.BOX and len(seed.lower) != self.safe_box.dimension:
                raise ValueError("The seed shield box must match the safe box dimension.")
        if not self.seeds:
            raise ValueError("At least one seed is required.")
        return self


class ConfigModel(StrictModel):
    pcis: ExperimentModel

    @classmethod
    def from_yaml_file(cls, file_path: str | Path) -> ConfigModel:
        """
        Load the configuration from a YAML file.
        :param file_path: Path to the YAML file
        :return: ConfigModel instance
        """
        with open(file_path) as f:
            data = yaml.safe_load(f)
        return cls(**(data or {}))

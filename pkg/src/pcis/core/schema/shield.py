"""
Module containing the runtime shield state and the records emitted by shielded training.
"""

from dataclasses import dataclass, field

import numpy as np

from src.pcis.core.schema.lattice import LatticeMask


@dataclass
class ShieldState:
    """
    The currently accepted shield.

    Attributes:
        omega_hat: Accepted shield set.
        action_sets: (N, size, |U|) stage-indexed safe-action sets.
        continuation: (N, size) stored continuation action per stage.
        horizon: N.
        stage_pointer: Stage used by the next filter call, in {0..N-1}.
        update_index: Number of accepted updates since the seed.
        anomaly_count: Filter calls that met an empty safe-action set inside omega_hat.
    """

    omega_hat: LatticeMask
    action_sets: np.ndarray
    continuation: np.ndarray
    horizon: int
    stage_pointer: int = 0
    update_index: int = 0
    anomaly_count: int = 0


@dataclass(frozen=True)
class StepRecord:
    """
    One executed training step, as written to the trajectory CSV.
    """

    step: int
    observation: tuple[float, ...]
    action_proposed: int
    action_executed: int
    reward: float
    in_omega: bool
    unsafe_exit: bool


@dataclass(frozen=True)
class IntervalRecord:
    """
    Summary of one grow / certify update interval.
    """

    interval_index: int
    interval_return: float
    cumulative_return: float
    executed_steps: int
    unsafe_steps: int
    cert_unsafe_steps: int
    goal_reached: bool
    omega_hat_size: int
    tentative_size: int
    accepted: bool


@dataclass
class RunRecord:
    """
    Everything a single seeded training run produced.
    """

    seed: int
    shielded: bool
    intervals: list[IntervalRecord] = field(default_factory=list)
    trajectory: list[StepRecord] = field(default_factory=list)
    shield_snapshots: list[LatticeMask] = field(default_factory=list)
    learner_weights: np.ndarray | None = None
    filter_anomalies: int = 0

    @property
    def unsafe_steps(self) -> int:
        return sum(interval.unsafe_steps for interval in self.intervals)

    @property
    def fully_safe(self) -> bool:
        return self.unsafe_steps == 0

    @property
    def goal_reached(self) -> bool:
        return any(interval.goal_reached for interval in self.intervals)

    @property
    def executed_steps(self) -> int:
        return sum(interval.executed_steps for interval in self.intervals)


@dataclass(frozen=True)
class ReturnCurvePoint:
    """
    Interval returns of one update interval aggregated across seeds.
    """

    interval_index: int
    runs: int
    mean_return: float
    sd_return: float
    mean_omega_hat_size: float


@dataclass
class RunSummary:
    """
    Aggregate metrics of one arm (shielded or unshielded) over all seeds.

    Attributes:
        fully_safe_rate: Fraction of runs with zero unsafe training steps.
        goal_rate: Fraction of runs that reached the goal at least once.
        curve: Mean and sd of interval returns per interval index.
    """

    shielded: bool
    seeds: tuple[int, ...]
    fully_safe_rate: float
    goal_rate: float
    total_unsafe_steps: int
    total_cert_unsafe_steps: int
    total_filter_anomalies: int
    curve: list[ReturnCurvePoint] = field(default_factory=list)

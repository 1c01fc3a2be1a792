"""
Module containing the report types of the conservatism property suite.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class TrialOutcome:
    """
    Result of one randomized trial.
    """

    trial: int
    state_count: int
    action_count: int
    horizon: int
    covered: bool
    values_bounded: bool
    contained_in_omega: bool
    nonempty_action_sets: bool
    certified: bool
    certification_sound: bool


@dataclass
class VerificationReport:
    """
    Property-suite report written by the verify command.
    """

    trials: list[TrialOutcome] = field(default_factory=list)
    checks: list[InvariantCheck] = field(default_factory=list)
    coverage: float = 0.0
    threshold: float = 0.0
    p_value: float = 1.0

    @property
    def passed(self) -> bool:
        return bool(self.trials) and all(check.passed for check in self.checks)

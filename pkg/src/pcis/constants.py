"""
Module containing Enums used within the pcis toolkit.
"""

from enum import IntEnum

from strenum import StrEnum


class FeatureKind(StrEnum):
    """
    Supported state-action feature maps.
    """

    FOURIER = "fourier"
    ONE_HOT_TABULAR = "one_hot_tabular"


class EnvironmentKind(StrEnum):
    """
    Simulated environments behind the common stepping interface.
    """

    MOUNTAIN_CAR = "mountain_car"
    FINITE_MDP = "finite_mdp"


class LearnerKind(StrEnum):
    """
    Proposal learners that can sit behind the shield.
    """

    SARSA = "sarsa"
    Q_LEARNING = "q_learning"


class ScheduleKind(StrEnum):
    """
    Exploration schedules for epsilon-greedy proposals.
    """

    EXPONENTIAL = "exponential"
    LINEAR = "linear"


class SeedShieldKind(StrEnum):
    """
    How the initial shield set is built.

    Steps:
        - Box: lattice points inside a configured box around the initial-state region.
        - Full Lattice: every lattice point of the safe set (permissive seed).
    """

    BOX = "box"
    FULL_LATTICE = "full_lattice"


class SeedActionRule(StrEnum):
    """
    Safe-action map attached to the initial shield set.
    """

    STOP_PRESERVING = "stop_preserving"
    ALL = "all"


class CertificationPolicyKind(StrEnum):
    """
    Fixed data-collection protocols for certification rollouts.
    """

    TENTATIVE_SAFE_UNIFORM = "tentative_safe_uniform"
    UNIFORM = "uniform"


class DatasetTag(StrEnum):
    """
    Provenance tag carried by every transition so the grow / certification
    split can be enforced structurally.
    """

    GROW = "grow"
    CERTIFICATION = "certification"
    BEHAVIOUR = "behaviour"


class RngStream(StrEnum):
    """
    Named random streams derived from the master seed.
    """

    ENVIRONMENT = "environment"
    EXPLORATION = "exploration"
    GROW = "grow"
    CERTIFICATION = "certification"
    CERTIFICATION_POLICY = "certification_policy"
    MODEL = "model"
    DATASET = "dataset"
    VERIFY = "verify"


class CsvSchema(StrEnum):
    """
    Kinds of CSV artifacts, written into the versioned header line.
    """

    DATASET = "pcis-dataset"
    MASK = "pcis-mask"
    MASK_SNAPSHOTS = "pcis-mask-snapshots"
    VALUE_TABLE = "pcis-values"
    OPERATOR_RESULT = "pcis-operator"
    VERDICT = "pcis-verdict"
    INTERVALS = "pcis-intervals"
    TRAJECTORY = "pcis-trajectory"
    SUMMARY = "pcis-summary"
    WEIGHTS = "pcis-weights"
    KERNEL = "pcis-kernel"
    VERIFY_REPORT = "pcis-verify"
    MANIFEST = "pcis-manifest"


class ExitCode(IntEnum):
    """
    Process exit codes of the CLI.
    """

    SUCCESS = 0
    VALIDATION_ERROR = 1
    PROPERTY_FAILURE = 2

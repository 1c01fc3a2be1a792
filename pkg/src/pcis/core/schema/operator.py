"""
Module containing the outputs of the conservative operator and of hold-out certification.
"""

from dataclasses import dataclass, field

import numpy as np

from src.pcis.core.schema.lattice import LatticeMask, SafetyValueTable
from src.pcis.core.schema.ridge import RidgeStage


@dataclass(frozen=True, eq=False)
class OperatorResult:
    """
    One evaluation of the conservative operator on a reference set omega.

    Attributes:
        omega: The reference set the recursion was evaluated on.
        q_set: Lattice points of omega whose stage-0 value reaches 1 - epsilon.
        value_table: Clipped values for stages 0..N.
        lower_bounds: (N, size, |U|) unclipped lower confidence values, -inf outside omega.
        action_sets: (N, size, |U|) thresholded safe-action sets per stage.
        continuation: (N, size) argmax of the lower bound per stage (ties to the lowest
            action), which also maximizes its clipped value. The continuation selector
            for receding-horizon use.
        stages: Fitted regression state per stage.
        epsilon: Safety tolerance used for thresholding.
        short_blocks: Stage indices whose data block was empty.
    """

    omega: LatticeMask
    q_set: LatticeMask
    value_table: SafetyValueTable
    lower_bounds: np.ndarray
    action_sets: np.ndarray
    continuation: np.ndarray
    stages: list[RidgeStage]
    epsilon: float
    short_blocks: list[int] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return self.action_sets.shape[0]

    @property
    def action_count(self) -> int:
        return self.action_sets.shape[2]


@dataclass(frozen=True, eq=False)
class CertificationOutcome:
    """
    Verdict of a single certification evaluation on a fixed tentative set.

    Attributes:
        accepted: True iff the tentative set is contained in cert_set.
        omega_tent: The tentative set that was certified.
        cert_set: Operator image of omega_tent computed from certification data.
        result: The full certification recursion, carrying the action maps that are
            deployed on acceptance.
    """

    accepted: bool
    omega_tent: LatticeMask
    cert_set: LatticeMask
    result: OperatorResult

    @property
    def cert_action_maps(self) -> np.ndarray:
        return self.result.action_sets

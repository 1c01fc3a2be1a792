"""
Module containing the regression state and the confidence parameters of the
conservative backward recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import cholesky


@dataclass(frozen=True, eq=False)
class RidgeStage:
    """
    Per-stage regularized least-squares state.

    Attributes:
        gram: V = lambda I + D^T D, symmetric positive definite.
        gram_inverse: V^-1, maintained by rank-one updates between re-factorizations.
        theta_hat: V^-1 D^T y.
        moment: D^T y, kept so further rows can be absorbed.
        beta: width multiplier used by lower_confidence.
        sample_count: rows absorbed since initialization.
        ridge_lambda: regularization strength.
        absorptions_since_refactor: rank-one updates applied since the last full factorization.
    """

    gram: np.ndarray
    gram_inverse: np.ndarray
    theta_hat: np.ndarray
    moment: np.ndarray
    beta: float = 0.0
    sample_count: int = 0
    ridge_lambda: float = 1.0
    absorptions_since_refactor: int = 0

    @property
    def dimension(self) -> int:
        return self.theta_hat.shape[0]

    @cached_property
    def cholesky_lower(self) -> np.ndarray:
        """Lower Cholesky factor of the Gram matrix, computed on first use."""
        return cholesky(self.gram, lower=True)


class ConfidenceParams(BaseModel):
    """
    Safety tolerance, confidence level and per-stage failure budget of the
    conservative operator.

    per_stage_delta defaults to the uniform split (1 - eta) / horizon.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(0.3, gt=0.0, lt=1.0)
    eta: float = Field(0.9, gt=0.0, lt=1.0)
    horizon: int = Field(1, ge=1)
    per_stage_delta: tuple[float, ...] | None = None
    sub_gaussian_r: float = Field(0.5, gt=0.0)
    theta_norm_bound: float | None = Field(None, gt=0.0)
    ridge_lambda: float = Field(1.0, gt=0.0)
    beta_override: float | None = Field(None, ge=0.0)
    penalty_scale: float = Field(1.0, ge=0.0)

    @model_validator(mode="after")
    def validate_deltas(self) -> ConfidenceParams:
        """
        Check the per-stage failure probabilities: one per stage, strictly inside (0, 1)
        and summing to at most 1 - eta.
        :return: The validated parameters.
        :raises: ValueError if the budget is violated.
        """
        if self.per_stage_delta is None:
            return self
        if len(self.per_stage_delta) != self.horizon:
            raise ValueError(
                f"per_stage_delta has {len(self.per_stage_delta)} entries, "
                f"expected horizon={self.horizon}."
            )
        if any(not 0.0 < delta < 1.0 for delta in self.per_stage_delta):
            raise ValueError("Every per-stage delta must lie strictly inside (0, 1).")
        if math.fsum(self.per_stage_delta) > 1.0 - self.eta + 1e-12:
            raise ValueError(
                f"Sum of per-stage deltas {math.fsum(self.per_stage_delta):.6g} "
                f"exceeds 1 - eta = {1.0 - self.eta:.6g}."
            )
        return self

    @property
    def deltas(self) -> tuple[float, ...]:
        """Per-stage failure probabilities, uniform when not configured."""
        if self.per_stage_delta is not None:
            return self.per_stage_delta
        return tuple((1.0 - self.eta) / self.horizon for _ in range(self.horizon))

    @property
    def threshold(self) -> float:
        """Required safety probability 1 - epsilon."""
        return 1.0 - self.epsilon

"""
Python module containing the RidgeService: regularized least squares with
self-normalized confidence widths, the statistical engine behind every
conservative lower bound of the backward recursion.
"""

import dataclasses
import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from src.pcis.core.config import settings
from src.pcis.core.exceptions import ContractViolationError, InvalidArgumentError
from src.pcis.core.logger import logger
from src.pcis.core.schema.ridge import ConfidenceParams, RidgeStage


class RidgeService:
    """
    Fits per-stage ridge regressions and evaluates lower confidence bounds

        l(phi) = theta_hat^T phi - penalty - beta * sqrt(phi^T V^-1 phi).

    The Gram inverse is carried along with rank-one (Sherman-Morrison) updates and
    fully re-factorized once refactor_interval absorptions have accumulated. Above
    cholesky_threshold dimensions, solves go through the Cholesky factor of V
    instead of the explicit inverse.
    """

    def __init__(
        self,
        refactor_interval: int | None = None,
        cholesky_threshold: int | None = None,
    ):
        self.refactor_interval = refactor_interval or settings.GRAM_REFACTOR_INTERVAL
        self.cholesky_threshold = (
            settings.CHOLESKY_DIMENSION_THRESHOLD
            if cholesky_threshold is None
            else cholesky_threshold
        )

    def init_stage(self, dimension: int, ridge_lambda: float = 1.0) -> RidgeStage:
        """
        Create the regression state of an empty dataset, V = lambda I.
        :param dimension: Feature dimension d.
        :param ridge_lambda: Regularization strength lambda.
        :return: A fresh RidgeStage with theta_hat = 0.
        :raises InvalidArgumentError: If d < 1 or lambda <= 0.
        """
        if dimension < 1:
            raise InvalidArgumentError(f"Feature dimension must be positive, got {dimension}.")
        if not ridge_lambda > 0.0:
            raise InvalidArgumentError(f"Ridge lambda must be positive, got {ridge_lambda}.")

        identity = np.eye(dimension)
        return RidgeStage(
            gram=ridge_lambda * identity,
            gram_inverse=identity / ridge_lambda,
            theta_hat=np.zeros(dimension),
            moment=np.zeros(dimension),
            beta=0.0,
            sample_count=0,
            ridge_lambda=float(ridge_lambda),
        )

    def fit(self, stage: RidgeStage, features: np.ndarray, targets: np.ndarray) -> RidgeStage:
        """
        Absorb a batch of (phi_t, y_t) rows. The input stage is left untouched.
        :param stage: Stage to start from.
        :param features: (T, d) design rows.
        :param targets: (T,) regression targets in [0, 1].
        :return: A new stage with V += D^T D and theta_hat = V^-1 (moment + D^T y).
        :raises InvalidArgumentError: On shape mismatches.
        :raises ContractViolationError: If a target lies outside [0, 1].
        """
        dimension = stage.dimension
        features = np.asarray(features, dtype=float).reshape(-1, dimension)
        targets = np.asarray(targets, dtype=float).reshape(-1)

        if features.shape[0] != targets.shape[0]:
            raise InvalidArgumentError(
                f"{features.shape[0]} feature rows given for {targets.shape[0]} targets."
            )
        if features.shape[0] == 0:
            return stage
        if np.any(targets < 0.0) or np.any(targets > 1.0):
            raise ContractViolationError("Regression targets must lie in [0, 1].")

        rows = features.shape[0]
        gram = stage.gram + features.T @ features
        moment = stage.moment + features.T @ targets
        pending = stage.absorptions_since_refactor + rows

        if pending >= self.refactor_interval:
            factor = cho_factor(gram, lower=True)
            gram_inverse = cho_solve(factor, np.eye(dimension))
            gram_inverse = 0.5 * (gram_inverse + gram_inverse.T)
            pending = 0
            logger.debug("[Ridge]: Re-factorized %dx%d Gram matrix.", dimension, dimension)
        else:
            gram_inverse = self._rank_one_updates(stage.gram_inverse, features)

        if dimension > self.cholesky_threshold:
            theta_hat = cho_solve(cho_factor(gram, lower=True), moment)
        else:
            theta_hat = gram_inverse @ moment

        return dataclasses.replace(
            stage,
            gram=gram,
            gram_inverse=gram_inverse,
            theta_hat=theta_hat,
            moment=moment,
            sample_count=stage.sample_count + rows,
            absorptions_since_refactor=pending,
        )

    def retarget(self, stage: RidgeStage, features: np.ndarray, targets: np.ndarray) -> RidgeStage:
        """
        Re-solve theta_hat for new targets on a design that is already absorbed. The Gram
        matrix does not depend on the targets, so ConInv iterations reuse it.
        :param stage: Stage produced by fit() from a fresh init_stage() on exactly these rows.
        :param features: (T, d) rows absorbed into stage.
        :param targets: (T,) new targets in [0, 1].
        :return: Stage with the same Gram and a new theta_hat.
        """
        features = np.asarray(features, dtype=float).reshape(-1, stage.dimension)
        targets = np.asarray(targets, dtype=float).reshape(-1)
        if features.shape[0] != stage.sample_count or targets.shape[0] != stage.sample_count:
            raise InvalidArgumentError(
                f"Stage absorbed {stage.sample_count} rows, got {features.shape[0]} rows "
                f"and {targets.shape[0]} targets."
            )
        if np.any(targets < 0.0) or np.any(targets > 1.0):
            raise ContractViolationError("Regression targets must lie in [0, 1].")

        moment = features.T @ targets
        if stage.dimension > self.cholesky_threshold:
            theta_hat = cho_solve((stage.cholesky_lower, True), moment)
        else:
            theta_hat = stage.gram_inverse @ moment
        return dataclasses.replace(stage, theta_hat=theta_hat, moment=moment)

    def sigma(self, stage: RidgeStage, feature: np.ndarray) -> float:
        """
        Self-normalized width sqrt(phi^T V^-1 phi) of a single feature vector.
        :param stage: Fitted stage.
        :param feature: (d,) feature vector.
        :return: Nonnegative width.
        """
        feature = np.asarray(feature, dtype=float)
        if feature.shape != (stage.dimension,):
            raise InvalidArgumentError(
                f"Feature of shape {feature.shape} does not match dimension {stage.dimension}."
            )
        return float(self.sigmas(stage, feature[None, :])[0])

    def sigmas(self, stage: RidgeStage, features: np.ndarray) -> np.ndarray:
        """
        Vectorized widths for a batch of features.
        :param stage: Fitted stage.
        :param features: (M, d) feature rows.
        :return: (M,) nonnegative widths.
        """
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != stage.dimension:
            raise InvalidArgumentError(
                f"Features of shape {features.shape} do not match dimension {stage.dimension}."
            )
        if stage.dimension > self.cholesky_threshold:
            whitened = solve_triangular(stage.cholesky_lower, features.T, lower=True)
            quadratic = np.sum(whitened * whitened, axis=0)
        else:
            quadratic = np.einsum("ij,jk,ik->i", features, stage.gram_inverse, features)
        return np.sqrt(np.maximum(quadratic, 0.0))

    @staticmethod
    def beta_default(
        params: ConfidenceParams,
        stage_index: int,
        sample_count: int,
        ridge_lambda: float,
        dimension: int,
    ) -> float:
        """
        Width multiplier of the self-normalized bound for bounded targets,

            beta_j = R sqrt(d log((1 + T_j / lambda) / delta_j)) + sqrt(lambda) S,

        with R = params.sub_gaussian_r and S = params.theta_norm_bound or sqrt(d).
        :param params: Confidence parameters holding the per-stage deltas.
        :param stage_index: j in {0..N-1}.
        :param sample_count: T_j, rows in the stage-j block.
        :param ridge_lambda: lambda.
        :param dimension: d.
        :return: beta_j >= 0.
        :raises InvalidArgumentError: If j is out of range or delta_j is not in (0, 1).
        """
        if not 0 <= stage_index < params.horizon:
            raise InvalidArgumentError(
                f"Stage index {stage_index} outside [0, {params.horizon})."
            )
        delta = params.deltas[stage_index]
        if not 0.0 < delta < 1.0:
            raise InvalidArgumentError(f"delta_{stage_index} = {delta} must lie in (0, 1).")

        norm_bound = params.theta_norm_bound or math.sqrt(dimension)
        log_term = math.log((1.0 + sample_count / ridge_lambda) / delta)
        return params.sub_gaussian_r * math.sqrt(dimension * log_term) + math.sqrt(
            ridge_lambda
        ) * norm_bound

    def lower_confidence(
        self, stage: RidgeStage, feature: np.ndarray, discretization_penalty: float = 0.0
    ) -> float:
        """
        Unclipped lower confidence value theta_hat^T phi - penalty - beta sigma(phi).
        :param stage: Fitted stage carrying beta.
        :param feature: (d,) feature vector.
        :param discretization_penalty: 0 for finite states, d L_phi delta_x on a lattice.
        :return: The lower bound.
        """
        feature = np.asarray(feature, dtype=float)
        width = self.sigma(stage, feature)
        return float(stage.theta_hat @ feature - discretization_penalty - stage.beta * width)

    def lower_confidences(
        self,
        stage: RidgeStage,
        features: np.ndarray,
        discretization_penalty: float = 0.0,
        widths: np.ndarray | None = None,
    ) -> np.ndarray:
        """
        Vectorized lower confidence values.
        :param stage: Fitted stage carrying beta.
        :param features: (M, d) feature rows.
        :param discretization_penalty: Penalty subtracted from every value.
        :param widths: Precomputed widths for these rows, if available.
        :return: (M,) lower bounds.
        """
        features = np.asarray(features, dtype=float)
        if widths is None:
            widths = self.sigmas(stage, features)
        return features @ stage.theta_hat - discretization_penalty - stage.beta * widths

    @staticmethod
    def with_beta(stage: RidgeStage, beta: float) -> RidgeStage:
        """Copy of the stage carrying a new width multiplier."""
        return dataclasses.replace(stage, beta=float(beta))

    @staticmethod
    def _rank_one_updates(gram_inverse: np.ndarray, features: np.ndarray) -> np.ndarray:
        inverse = gram_inverse.copy()
        for row in features:
            projected = inverse @ row
            inverse -= np.outer(projected, projected) / (1.0 + row @ projected)
        return inverse

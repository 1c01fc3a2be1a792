"""
Verification Service Module containing the Monte Carlo conservatism suite: randomized
finite MDPs with one-hot features, checked against the exact oracle.
"""

import numpy as np
from scipy import stats

from src.pcis.constants import DatasetTag, RngStream
from src.pcis.core.logger import logger
from src.pcis.core.schema.config.config import FiniteMdpSpecModel, VerifyModel
from src.pcis.core.schema.lattice import LatticeMask
from src.pcis.core.schema.ridge import ConfidenceParams
from src.pcis.core.schema.verification import (
    InvariantCheck,
    TrialOutcome,
    VerificationReport,
)
from src.pcis.services.feature_service import OneHotFeatureMap
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.operator_service import PcisOperatorService
from src.pcis.services.oracle_service import OracleService
from src.pcis.services.rng_service import RngService
from src.pcis.utils import coverage_threshold


class VerificationService:
    """
    Verification Service running the conservatism Monte Carlo suite.

    Each trial draws a random finite MDP, samples N stagewise blocks of grow data and an
    independent certification dataset, and checks:
        - coverage: Q~(X_S) is contained in the exact Q(X_S),
        - every recursion value lies in [0, 1] and Q~(Omega) is contained in Omega,
        - thresholded points have nonempty action sets,
        - an accepted ConInv fixed point is an exact fixed point whenever the
          certification inclusion event holds.
    """

    def __init__(self, verify: VerifyModel):
        self.verify = verify

    def run(self) -> VerificationReport:
        """
        Run every trial and aggregate the invariant checks.
        :return: The report, failing when there are no trials.
        """
        report = VerificationReport()
        rng_service = RngService(self.verify.seed)
        for trial in range(self.verify.trials):
            report.trials.append(self.run_trial(trial, rng_service.stream(RngStream.VERIFY, trial)))

        count = len(report.trials)
        if count == 0:
            logger.warning("[Verify]: No trials configured, nothing to report.")
            return report

        covered = sum(outcome.covered for outcome in report.trials)
        report.coverage = covered / count
        report.threshold = coverage_threshold(self.verify.eta, count, self.verify.sigmas)
        report.p_value = float(stats.binom.cdf(covered, count, self.verify.eta))
        report.checks = [
            InvariantCheck(
                "conservative_coverage",
                report.coverage >= report.threshold,
                f"{covered}/{count} trials covered, rate {report.coverage:.4f} "
                f"vs threshold {report.threshold:.4f}",
            ),
            self._all("values_in_unit_interval", report, "values_bounded"),
            self._all("q_set_within_omega", report, "contained_in_omega"),
            self._all("nonempty_action_sets", report, "nonempty_action_sets"),
            self._all("certification_soundness", report, "certification_sound"),
        ]
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            logger.info("[Verify]: %s %s (%s).", check.name, status, check.detail)
        return report

    def run_trial(self, trial: int, rng: np.random.Generator) -> TrialOutcome:
        """
        Run one randomized conservatism trial.
        :param trial: Trial index.
        :param rng: Stream of this trial.
        :return: The trial outcome.
        """
        state_count = int(rng.integers(self.verify.min_states, self.verify.max_states + 1))
        action_count = int(rng.integers(1, self.verify.max_actions + 1))
        horizon = self.verify.horizons[trial % len(self.verify.horizons)]
        spec = FiniteMdpSpecModel(state_count=state_count, action_count=action_count)
        model = OracleService.random_model(spec, rng)

        grid = LatticeService.tabular_grid(state_count)
        params = ConfidenceParams(epsilon=self.verify.epsilon, eta=self.verify.eta, horizon=horizon)
        operator = PcisOperatorService(OneHotFeatureMap(state_count, action_count), grid, params)
        safe_mask = LatticeMask(grid=grid, bits=model.safe_states)

        samples = self.verify.samples_per_stage * horizon
        grow = OracleService.sample_transitions(model, samples, rng, DatasetTag.GROW)
        result = operator.conservative_operator(safe_mask, operator.split_stagewise(grow, horizon))
        exact = OracleService.exact_q_operator(model, model.safe_states, horizon, params.epsilon)

        thresholded = (result.value_table.values[:horizon] >= params.threshold) & safe_mask.bits
        nonempty = bool(np.all(result.action_sets.any(axis=2)[thresholded]))

        omega_tent, _ = operator.con_inv(grow, safe_mask)
        cert = OracleService.sample_transitions(model, samples, rng, DatasetTag.CERTIFICATION)
        outcome = operator.certify_shield(cert, omega_tent)
        exact_image = OracleService.exact_q_operator(
            model, omega_tent.bits, horizon, params.epsilon
        )
        inclusion = not np.any(outcome.cert_set.bits & ~exact_image)
        sound = not (outcome.accepted and inclusion) or np.array_equal(exact_image, omega_tent.bits)

        values = result.value_table.values
        return TrialOutcome(
            trial=trial,
            state_count=state_count,
            action_count=action_count,
            horizon=horizon,
            covered=not np.any(result.q_set.bits & ~exact),
            values_bounded=bool(np.all((values >= 0.0) & (values <= 1.0))),
            contained_in_omega=result.q_set.is_subset_of(safe_mask),
            nonempty_action_sets=nonempty,
            certified=outcome.accepted,
            certification_sound=bool(sound),
        )

    @staticmethod
    def _all(name: str, report: VerificationReport, attribute: str) -> InvariantCheck:
        failures = [o.trial for o in report.trials if not getattr(o, attribute)]
        passing = len(report.trials) - len(failures)
        detail = f"{passing}/{len(report.trials)} trials, failing {failures[:10]}"
        return InvariantCheck(name, not failures, detail)

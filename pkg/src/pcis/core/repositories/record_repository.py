"""
Record Repository containing training run records, summaries, learner weights,
finite-MDP kernels, verification reports and run manifests.
"""

from pathlib import Path

import numpy as np

from src.pcis.constants import CsvSchema
from src.pcis.core.repositories.base_repository import Repository
from src.pcis.core.schema.mdp import FiniteMdpModel
from src.pcis.core.schema.shield import IntervalRecord, RunRecord, RunSummary
from src.pcis.core.schema.verification import VerificationReport

INTERVAL_COLUMNS = [
    "interval_index",
    "interval_return",
    "cumulative_return",
    "executed_steps",
    "unsafe_steps",
    "cert_unsafe_steps",
    "goal_reached",
    "omega_hat_size",
    "tentative_size",
    "accepted",
]


class RecordRepository(Repository[RunRecord]):
    """
    Per-seed run artifacts and the experiment level summaries built from them.
    """

    kind = CsvSchema.INTERVALS

    def save(
        self, obj: RunRecord, path: Path | str, config_hash: str, seed: int | str | None = None
    ) -> Path:
        """
        Write the interval rows of a run, one row per update interval.
        """
        rows = ([getattr(interval, c) for c in INTERVAL_COLUMNS] for interval in obj.intervals)
        seed = obj.seed if seed is None else seed
        return self.write_table(path, self.kind, INTERVAL_COLUMNS, rows, config_hash, seed)

    def load_intervals(self, path: Path | str) -> list[IntervalRecord]:
        table = self.read_table(path, self.kind)
        if table is None:
            return []
        records = []
        for line, cells in table.rows:
            values = dict(zip(table.columns, cells, strict=True))
            records.append(
                IntervalRecord(
                    interval_index=self.parse_int(values["interval_index"], line),
                    interval_return=self.parse_float(values["interval_return"], line),
                    cumulative_return=self.parse_float(values["cumulative_return"], line),
                    executed_steps=self.parse_int(values["executed_steps"], line),
                    unsafe_steps=self.parse_int(values["unsafe_steps"], line),
                    cert_unsafe_steps=self.parse_int(values["cert_unsafe_steps"], line),
                    goal_reached=self.parse_bool(values["goal_reached"], line),
                    omega_hat_size=self.parse_int(values["omega_hat_size"], line),
                    tentative_size=self.parse_int(values["tentative_size"], line),
                    accepted=self.parse_bool(values["accepted"], line),
                )
            )
        return records

    def save_trajectory(self, record: RunRecord, path: Path | str, config_hash: str) -> Path:
        dimension = len(record.trajectory[0].observation) if record.trajectory else 0
        columns = [
            "step",
            *(f"x_{i}" for i in range(dimension)),
            "action_proposed",
            "action_executed",
            "reward",
            "in_omega",
            "unsafe_exit",
        ]
        rows = (
            [
                step.step,
                *step.observation,
                step.action_proposed,
                step.action_executed,
                float(step.reward),
                step.in_omega,
                step.unsafe_exit,
            ]
            for step in record.trajectory
        )
        return self.write_table(
            path, CsvSchema.TRAJECTORY, columns, rows, config_hash, record.seed
        )

    def save_snapshots(self, record: RunRecord, path: Path | str, config_hash: str) -> Path:
        """
        Shield snapshot after every interval, as the member indices of omega_hat.
        """
        rows = (
            [interval, int(index)]
            for interval, mask in enumerate(record.shield_snapshots)
            for index in mask.indices
        )
        columns = ["interval_index", "index"]
        return self.write_table(
            path, CsvSchema.MASK_SNAPSHOTS, columns, rows, config_hash, record.seed
        )

    def save_summary(self, summary: RunSummary, path: Path | str, config_hash: str) -> Path:
        """
        Return curve of one arm followed by its run-level rates. Metric rows leave the
        curve columns empty.
        """
        columns = [
            "interval_index",
            "runs",
            "mean_return",
            "sd_return",
            "mean_omega_hat_size",
            "metric",
            "value",
        ]
        rows: list[list[object]] = [
            [
                point.interval_index,
                point.runs,
                point.mean_return,
                point.sd_return,
                point.mean_omega_hat_size,
                "",
                "",
            ]
            for point in summary.curve
        ]
        metrics = {
            "shielded": summary.shielded,
            "runs": len(summary.seeds),
            "fully_safe_rate": float(summary.fully_safe_rate),
            "goal_rate": float(summary.goal_rate),
            "total_unsafe_steps": summary.total_unsafe_steps,
            "total_cert_unsafe_steps": summary.total_cert_unsafe_steps,
            "total_filter_anomalies": summary.total_filter_anomalies,
        }
        rows.extend(["", "", "", "", "", name, value] for name, value in metrics.items())
        seeds = "+".join(str(seed) for seed in summary.seeds)
        return self.write_table(path, CsvSchema.SUMMARY, columns, rows, config_hash, seeds)

    def save_weights(
        self, weights: np.ndarray, path: Path | str, config_hash: str, seed: int | str | None
    ) -> Path:
        """
        Learner parameters, one row per (action, feature) entry.
        """
        weights = np.atleast_2d(np.asarray(weights, dtype=float))
        rows = (
            [row, column, float(weights[row, column])]
            for row in range(weights.shape[0])
            for column in range(weights.shape[1])
        )
        return self.write_table(
            path, CsvSchema.WEIGHTS, ["row", "column", "weight"], rows, config_hash, seed
        )

    def save_kernel(
        self, model: FiniteMdpModel, path: Path | str, config_hash: str, seed: int | str | None
    ) -> Path:
        """
        Finite-MDP kernel dump. next_state == state_count denotes the unsafe sink.
        """
        columns = ["state", "action", "next_state", "probability", "safe", "reward"]
        rows = (
            [
                x,
                u,
                y,
                float(model.kernel[x, u, y]),
                bool(model.safe_states[x]),
                float(model.rewards[x, u]),
            ]
            for x in range(model.state_count)
            for u in range(model.action_count)
            for y in range(model.state_count + 1)
        )
        return self.write_table(path, CsvSchema.KERNEL, columns, rows, config_hash, seed)

    def save_verify_report(
        self,
        report: VerificationReport,
        path: Path | str,
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        """
        Aggregate coverage line, one line per invariant check, then one line per trial.
        """
        columns = ["record", "name", "passed", "value", "detail"]
        rows: list[list[object]] = [
            ["coverage", "empirical_rate", report.passed, float(report.coverage), ""],
            ["coverage", "threshold", report.passed, float(report.threshold), ""],
            ["coverage", "binomial_p_value", report.passed, float(report.p_value), ""],
        ]
        rows.extend(
            ["check", check.name, check.passed, "", check.detail] for check in report.checks
        )
        rows.extend(
            [
                "trial",
                str(trial.trial),
                trial.covered,
                "",
                f"S={trial.state_count} U={trial.action_count} N={trial.horizon} "
                f"certified={int(trial.certified)}",
            ]
            for trial in report.trials
        )
        return self.write_table(path, CsvSchema.VERIFY_REPORT, columns, rows, config_hash, seed)

    def save_manifest(
        self,
        entries: dict[str, object],
        path: Path | str,
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        rows = ([key, value] for key, value in entries.items())
        return self.write_table(
            path, CsvSchema.MANIFEST, ["key", "value"], rows, config_hash, seed
        )

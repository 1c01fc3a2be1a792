"""
Record Repository Unit Tests.
"""

import numpy as np

from src.pcis.core.repositories import RecordRepository
from src.pcis.core.schema.lattice import LatticeMask
from src.pcis.core.schema.shield import IntervalRecord, RunRecord, StepRecord
from src.pcis.core.schema.verification import InvariantCheck, TrialOutcome, VerificationReport
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.shield.training_service import TrainingService


def make_record(seed: int = 3) -> RunRecord:
    grid = LatticeService.tabular_grid(3)
    intervals = [
        IntervalRecord(0, -12.5, -12.5, 10, 0, 2, False, 1, 2, True),
        IntervalRecord(1, 1 / 3, -12.5 + 1 / 3, 4, 1, 0, True, 2, 2, False),
    ]
    trajectory = [
        StepRecord(1, (0.0,), 1, 1, -1.0, True, False),
        StepRecord(2, (1.0,), 0, 1, -1.0, False, True),
    ]
    snapshots = [
        LatticeMask(grid=grid, bits=[True, False, False]),
        LatticeMask(grid=grid, bits=[True, True, False]),
    ]
    return RunRecord(
        seed=seed,
        shielded=True,
        intervals=intervals,
        trajectory=trajectory,
        shield_snapshots=snapshots,
        learner_weights=np.array([[0.5, -0.25], [1e-3, 2.0]]),
    )


def read_rows(path) -> list[str]:
    return path.read_text().splitlines()


class TestRunArtifacts:
    def test_intervals_reload(self, tmp_path):
        """
        Test that interval rows written for a run load back as equal records.
        :param tmp_path: pytest temporary directory.
        """
        repository = RecordRepository(tmp_path)
        record = make_record()
        path = repository.save(record, repository.path("intervals.csv"), "abc")
        assert repository.load_intervals(path) == record.intervals
        assert read_rows(path)[0] == "# schema=pcis-intervals/v1 config_hash=abc seed=3"

    def test_trajectory_rows(self, tmp_path):
        repository = RecordRepository(tmp_path)
        path = repository.save_trajectory(make_record(), tmp_path / "trajectory.csv", "abc")
        rows = read_rows(path)
        assert rows[1] == "step,x_0,action_proposed,action_executed,reward,in_omega,unsafe_exit"
        assert rows[3] == "2,1.0,0,1,-1.0,0,1"

    def test_rewrites_are_byte_identical(self, tmp_path):
        """
        Test that writing the same run twice produces identical bytes.
        """
        repository = RecordRepository(tmp_path)
        for name in ("first", "second"):
            record = make_record()
            repository.save(record, tmp_path / name / "intervals.csv", "abc")
            repository.save_trajectory(record, tmp_path / name / "trajectory.csv", "abc")
            repository.save_snapshots(record, tmp_path / name / "snapshots.csv", "abc")
        for name in ("intervals.csv", "trajectory.csv", "snapshots.csv"):
            assert (tmp_path / "first" / name).read_bytes() == (
                tmp_path / "second" / name
            ).read_bytes()

    def test_snapshots_store_member_indices(self, tmp_path):
        repository = RecordRepository(tmp_path)
        path = repository.save_snapshots(make_record(), tmp_path / "snapshots.csv", "abc")
        assert read_rows(path)[2:] == ["0,0", "1,0", "1,1"]

    def test_weights(self, tmp_path):
        repository = RecordRepository(tmp_path)
        record = make_record()
        path = repository.save_weights(record.learner_weights, tmp_path / "w.csv", "abc", 3)
        rows = read_rows(path)
        assert len(rows) == 2 + 4
        assert rows[4] == "1,0,0.001"

    def test_empty_interval_file(self, tmp_path):
        path = tmp_path / "intervals.csv"
        path.write_text("")
        assert RecordRepository(tmp_path).load_intervals(path) == []


class TestSummaries:
    def test_summary_curve_and_metric_rows(self, tmp_path):
        """
        Test that a summary holds one curve row per interval followed by the metric rows.
        """
        repository = RecordRepository(tmp_path)
        summary = TrainingService.summarize_runs([make_record(0), make_record(1)])
        path = repository.save_summary(summary, tmp_path / "summary.csv", "abc")
        rows = read_rows(path)

        assert rows[0].endswith("seed=0+1")
        assert rows[2].startswith("0,2,-12.5,0.0,1.0,")
        metrics = dict(row.split(",")[-2:] for row in rows[4:])
        assert metrics["fully_safe_rate"] == "0.0"
        assert metrics["goal_rate"] == "1.0"
        assert metrics["total_unsafe_steps"] == "2"
        assert metrics["shielded"] == "1"

    def test_kernel_rows(self, tmp_path, fixture_model):
        repository = RecordRepository(tmp_path)
        path = repository.save_kernel(fixture_model, tmp_path / "kernel.csv", "abc", 0)
        rows = read_rows(path)
        assert len(rows) == 2 + 4 * 2 * 5
        assert rows[2] == "0,0,0,1.0,1,0.0"

    def test_verify_report(self, tmp_path):
        report = VerificationReport(
            trials=[TrialOutcome(0, 3, 2, 1, True, True, True, True, False, True)],
            checks=[InvariantCheck("values_in_unit_interval", True, "1/1 trials")],
            coverage=1.0,
            threshold=0.5,
            p_value=1.0,
        )
        path = RecordRepository(tmp_path).save_verify_report(report, tmp_path / "v.csv", "a", 0)
        rows = read_rows(path)
        assert rows[2] == "coverage,empirical_rate,1,1.0,"
        assert rows[5] == "check,values_in_unit_interval,1,,1/1 trials"
        assert rows[6] == "trial,0,1,,S=3 U=2 N=1 certified=0"

    def test_manifest(self, tmp_path):
        path = RecordRepository(tmp_path).save_manifest(
            {"command": "synthesize", "samples": 10}, tmp_path / "manifest.csv", "abc", 0
        )
        assert read_rows(path)[1:] == ["key,value", "command,synthesize", "samples,10"]

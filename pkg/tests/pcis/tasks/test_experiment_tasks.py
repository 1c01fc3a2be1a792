"""
Experiment Tasks Unit Tests.
"""

import pytest

from src.pcis.constants import DatasetTag, ExitCode
from src.pcis.core.exceptions import DataSeparationError, DatasetParseError
from src.pcis.core.repositories import DatasetRepository, LatticeRepository
from src.pcis.core.schema.config.config import VerifyModel
from src.pcis.core.schema.lattice import LatticeMask
from src.pcis.services.experiment_service import ExperimentService
from src.pcis.tasks import experiment_tasks


def one_interval(experiment):
    schedule = experiment.schedule.model_copy(update={"interval_budget": 1})
    return experiment.model_copy(update={"schedule": schedule, "seeds": (0,)})


class TestSynthesize:
    def test_empty_dataset_gives_empty_mask(self, finite_experiment, tmp_path):
        """
        Test that synthesis from an empty dataset succeeds with an empty tentative set.
        :param finite_experiment: Small finite-MDP experiment fixture.
        :param tmp_path: pytest temporary directory.
        """
        dataset = tmp_path / "empty.csv"
        dataset.write_text("")
        code = experiment_tasks.synthesize(finite_experiment, dataset, tmp_path / "out")

        assert code == ExitCode.SUCCESS
        grid = ExperimentService(finite_experiment).grid
        assert LatticeRepository().load(tmp_path / "out" / "mask.csv", grid).is_empty()
        assert (tmp_path / "out" / "manifest.csv").exists()

    def test_synthesize_from_exported_data(self, finite_experiment, tmp_path):
        experiment_tasks.export(finite_experiment, tmp_path, 2000)
        code = experiment_tasks.synthesize(
            finite_experiment, tmp_path / "behaviour.csv", tmp_path / "out"
        )
        assert code == ExitCode.SUCCESS
        for name in ("mask.csv", "values.csv", "action_maps.csv"):
            assert (tmp_path / "out" / name).exists()

    def test_truncated_dataset_is_rejected(self, finite_experiment, tmp_path):
        dataset = tmp_path / "truncated.csv"
        dataset.write_text(
            "# schema=pcis-dataset/v1 config_hash=abc seed=0\n"
            "state_0,action,next_state_0,tag\n"
            "0.0,1,2.0,grow\n"
            "1.0,0\n"
        )
        with pytest.raises(DatasetParseError) as exc_info:
            experiment_tasks.synthesize(finite_experiment, dataset, tmp_path / "out")
        assert exc_info.value.line_number == 4

    def test_certification_data_is_refused(self, finite_experiment, tmp_path):
        experiment_tasks.export(finite_experiment, tmp_path, 10)
        with pytest.raises(DataSeparationError):
            experiment_tasks.synthesize(
                finite_experiment, tmp_path / "certification.csv", tmp_path / "out"
            )


class TestCertify:
    def test_empty_mask_is_accepted(self, finite_experiment, tmp_path):
        """
        Test that certifying an empty tentative set always yields an accepting verdict.
        """
        experiment_tasks.export(finite_experiment, tmp_path, 200)
        grid = ExperimentService(finite_experiment).grid
        lattice = LatticeRepository(tmp_path)
        mask_path = lattice.save(LatticeMask.empty(grid), tmp_path / "empty_mask.csv", "a", 0)

        code = experiment_tasks.certify(
            finite_experiment, mask_path, tmp_path / "certification.csv", tmp_path / "out"
        )
        assert code == ExitCode.SUCCESS
        assert lattice.load_verdict(tmp_path / "out" / "verdict.csv")

    def test_grow_data_is_refused(self, finite_experiment, tmp_path, rng):
        grid = ExperimentService(finite_experiment).grid
        mask_path = LatticeRepository(tmp_path).save(
            LatticeMask.full(grid), tmp_path / "mask.csv", "a", 0
        )
        repository = DatasetRepository(tmp_path)
        grow = ExperimentService(finite_experiment).sample_behaviour_data(10, rng, DatasetTag.GROW)
        grow_path = repository.save(grow, tmp_path / "grow.csv", "a", 0)
        with pytest.raises(DataSeparationError):
            experiment_tasks.certify(finite_experiment, mask_path, grow_path, tmp_path / "out")


class TestTrain:
    def test_single_interval_writes_run_files(self, finite_experiment, tmp_path):
        experiment = one_interval(finite_experiment)
        code = experiment_tasks.train(experiment, tmp_path, max_workers=1)

        assert code == ExitCode.SUCCESS
        for name in (
            "intervals_shielded_seed0.csv",
            "trajectory_shielded_seed0.csv",
            "weights_shielded_seed0.csv",
            "snapshots_shielded_seed0.csv",
            "summary_shielded.csv",
        ):
            assert (tmp_path / name).exists()
        assert not (tmp_path / "summary_unshielded.csv").exists()

    def test_paired_runs_write_both_arms(self, finite_experiment, tmp_path):
        experiment = one_interval(finite_experiment)
        experiment_tasks.train(experiment, tmp_path, paired=True, max_workers=1)
        assert (tmp_path / "summary_shielded.csv").exists()
        assert (tmp_path / "summary_unshielded.csv").exists()
        assert not (tmp_path / "snapshots_unshielded_seed0.csv").exists()

    def test_replay_is_byte_identical(self, finite_experiment, tmp_path):
        """
        Test that rerunning a seeded training run reproduces every output file byte for byte.
        """
        for name in ("first", "second"):
            experiment_tasks.train(finite_experiment, tmp_path / name, max_workers=1)
        files = sorted(path.name for path in (tmp_path / "first").iterdir())
        assert files
        for name in files:
            assert (tmp_path / "first" / name).read_bytes() == (
                tmp_path / "second" / name
            ).read_bytes()


class TestVerifyAndExport:
    def test_zero_trials_is_a_property_failure(self, finite_experiment, tmp_path):
        experiment = finite_experiment.model_copy(update={"verify": VerifyModel(trials=0)})
        assert experiment_tasks.verify(experiment, tmp_path) == ExitCode.PROPERTY_FAILURE
        assert (tmp_path / "verify_report.csv").exists()

    def test_small_suite_passes(self, finite_experiment, tmp_path):
        assert experiment_tasks.verify(finite_experiment, tmp_path) == ExitCode.SUCCESS

    def test_export_writes_inputs(self, finite_experiment, tmp_path):
        """
        Test that export writes independent behaviour and certification datasets and the
        finite-MDP kernel.
        """
        assert experiment_tasks.export(finite_experiment, tmp_path, 25) == ExitCode.SUCCESS
        behaviour = DatasetRepository().load(tmp_path / "behaviour.csv", 1)
        cert = DatasetRepository().load(tmp_path / "certification.csv", 1)
        assert len(behaviour) == len(cert) == 25
        assert cert.tag == DatasetTag.CERTIFICATION
        assert (tmp_path / "kernel.csv").exists()
        assert (tmp_path / "safe_mask.csv").exists() and (tmp_path / "seed_mask.csv").exists()

"""
Tasks executed by the CLI commands: PCIS synthesis from a dataset, hold-out
certification of a stored mask, seeded shielded training, the conservatism
property suite and plot-data export.
"""

from pathlib import Path

from src.pcis.constants import DatasetTag, ExitCode, RngStream
from src.pcis.core.logger import logger
from src.pcis.core.repositories import DatasetRepository, LatticeRepository, RecordRepository
from src.pcis.core.schema.config.config import ExperimentModel
from src.pcis.core.schema.shield import RunRecord
from src.pcis.services.experiment_service import ExperimentService
from src.pcis.services.rng_service import RngService
from src.pcis.services.shield.training_service import TrainingService
from src.pcis.services.verification_service import VerificationService
from src.pcis.tasks.scheduler import JobModel, Scheduler
from src.pcis.utils import config_hash


def _arm(shielded: bool) -> str:
    return "shielded" if shielded else "unshielded"


def synthesize(experiment: ExperimentModel, dataset_path: Path, output_dir: Path) -> ExitCode:
    """
    Run ConInv on a grow dataset and write the tentative mask, its value table, its
    action maps and a manifest.
    """
    service = ExperimentService(experiment)
    digest, seed = config_hash(experiment), experiment.seeds[0]
    dataset = DatasetRepository().load(dataset_path, service.grid.dimension, DatasetTag.GROW)

    trace = []
    mask, result = service.operator_service.con_inv(dataset, service.safe_mask, trace=trace)
    lattice = LatticeRepository(output_dir)
    lattice.save(mask, lattice.path("mask.csv"), digest, seed)
    lattice.save_value_table(result.value_table, lattice.path("values.csv"), digest, seed)
    lattice.save_operator_result(result, lattice.path("action_maps.csv"), digest, seed)
    RecordRepository(output_dir).save_manifest(
        {
            "command": "synthesize",
            "dataset": str(dataset_path),
            "samples": len(dataset),
            "iterations": len(trace),
            "mask_size": mask.count,
            "lattice_size": service.grid.size,
        },
        Path(output_dir) / "manifest.csv",
        digest,
        seed,
    )
    logger.info(
        "[CLI]: Synthesized a tentative set of %d lattice points from %d samples.",
        mask.count,
        len(dataset),
    )
    return ExitCode.SUCCESS


def certify(
    experiment: ExperimentModel, mask_path: Path, dataset_path: Path, output_dir: Path
) -> ExitCode:
    """
    Certify a stored tentative mask on a certification dataset and write the verdict,
    the certification mask and the certification action maps.
    """
    service = ExperimentService(experiment)
    digest, seed = config_hash(experiment), experiment.seeds[0]
    lattice = LatticeRepository(output_dir)
    omega_tent = lattice.load(mask_path, service.grid)
    cert_data = DatasetRepository().load(
        dataset_path, service.grid.dimension, DatasetTag.CERTIFICATION
    )

    outcome = service.operator_service.certify_shield(cert_data, omega_tent)
    lattice.save_verdict(outcome, lattice.path("verdict.csv"), digest, seed)
    lattice.save(outcome.cert_set, lattice.path("cert_mask.csv"), digest, seed)
    lattice.save_operator_result(
        outcome.result, lattice.path("cert_action_maps.csv"), digest, seed
    )
    logger.info(
        "[CLI]: Tentative set of %d points %s.",
        omega_tent.count,
        "accepted" if outcome.accepted else "rejected",
    )
    return ExitCode.SUCCESS


def train_seed(
    experiment: ExperimentModel, seed: int, shielded: bool, output_dir: Path
) -> RunRecord:
    """
    One seeded training run, writing its per-seed files. Module level so the worker
    pool can pickle it.
    """
    service = ExperimentService(experiment)
    digest = config_hash(experiment)
    seed_shield = service.seed_shield() if shielded else None
    record = service.training_service().run_shielded_training(
        service.learner(), seed_shield, RngService(seed), shielded=shielded
    )

    records = RecordRepository(output_dir)
    prefix = f"{_arm(shielded)}_seed{seed}"
    records.save(record, records.path(f"intervals_{prefix}.csv"), digest)
    records.save_trajectory(record, records.path(f"trajectory_{prefix}.csv"), digest)
    if record.learner_weights is not None:
        records.save_weights(
            record.learner_weights, records.path(f"weights_{prefix}.csv"), digest, seed
        )
    if shielded:
        records.save_snapshots(record, records.path(f"snapshots_{prefix}.csv"), digest)
    return record


def train(
    experiment: ExperimentModel,
    output_dir: Path,
    paired: bool = False,
    max_workers: int | None = None,
) -> ExitCode:
    """
    Train every configured seed on a bounded worker pool and write one summary per arm.
    With paired, the shielded and unshielded arms run on identical seeds.
    """
    arms = [True, False] if paired else [experiment.shield.enabled]
    scheduler = Scheduler(max_workers=max_workers)
    for shielded in arms:
        for seed in experiment.seeds:
            scheduler.add_job(
                JobModel(
                    func=train_seed,
                    id=f"{_arm(shielded)}-{seed}",
                    name=f"Train seed {seed} ({_arm(shielded)})",
                    group=_arm(shielded),
                    args=[experiment, seed, shielded, Path(output_dir)],
                )
            )
    results = scheduler.run_jobs()

    digest = config_hash(experiment)
    records = RecordRepository(output_dir)
    summaries = {}
    for shielded in arms:
        runs = [results[f"{_arm(shielded)}-{seed}"] for seed in experiment.seeds]
        summary = TrainingService.summarize_runs(runs)
        summaries[shielded] = summary
        records.save_summary(summary, records.path(f"summary_{_arm(shielded)}.csv"), digest)
        logger.info(
            "[CLI]: %s arm: fully safe %.2f, goal reached %.2f, unsafe steps %d.",
            _arm(shielded),
            summary.fully_safe_rate,
            summary.goal_rate,
            summary.total_unsafe_steps,
        )
    if paired:
        logger.info(
            "[CLI]: Paired unsafe steps shielded %d vs unshielded %d.",
            summaries[True].total_unsafe_steps,
            summaries[False].total_unsafe_steps,
        )
    return ExitCode.SUCCESS


def verify(experiment: ExperimentModel, output_dir: Path) -> ExitCode:
    """
    Run the conservatism property suite. A failing invariant or an empty suite exits
    with the property-failure code.
    """
    report = VerificationService(experiment.verify).run()
    records = RecordRepository(output_dir)
    records.save_verify_report(
        report, records.path("verify_report.csv"), config_hash(experiment), experiment.verify.seed
    )
    if not report.passed:
        logger.error("[CLI]: Property suite failed.")
        return ExitCode.PROPERTY_FAILURE
    logger.info("[CLI]: Property suite passed, coverage %.4f.", report.coverage)
    return ExitCode.SUCCESS


def export(experiment: ExperimentModel, output_dir: Path, samples: int) -> ExitCode:
    """
    Write plot and input data: the safe-lattice mask, the seed shield, a behaviour
    dataset and an independent certification dataset sampled under a uniform-random
    policy, and the kernel of finite MDPs.
    """
    service = ExperimentService(experiment)
    digest, seed = config_hash(experiment), experiment.seeds[0]
    rng_service = RngService(seed)
    lattice = LatticeRepository(output_dir)
    datasets = DatasetRepository(output_dir)

    lattice.save(service.safe_mask, lattice.path("safe_mask.csv"), digest, seed)
    lattice.save(service.seed_shield().omega_hat, lattice.path("seed_mask.csv"), digest, seed)
    behaviour = service.sample_behaviour_data(samples, rng_service.stream(RngStream.DATASET))
    datasets.save(behaviour, datasets.path("behaviour.csv"), digest, seed)
    cert = service.sample_behaviour_data(
        samples, rng_service.stream(RngStream.CERTIFICATION), DatasetTag.CERTIFICATION
    )
    datasets.save(cert, datasets.path("certification.csv"), digest, seed)
    if service.is_finite:
        records = RecordRepository(output_dir)
        records.save_kernel(service.model, records.path("kernel.csv"), digest, seed)
    logger.info("[CLI]: Exported %d behaviour and certification samples.", samples)
    return ExitCode.SUCCESS

"""
Entrypoint for the pcis command-line interface.

Commands: synthesize, certify, train, verify and export. Every command reads the
YAML experiment config, applies the command-line overrides and validates the
result before any work starts.
"""

import argparse
import sys
from pathlib import Path

import yaml
from pydantic import ValidationError

from src.pcis.constants import ExitCode
from src.pcis.core.config import settings
from src.pcis.core.exceptions import PcisError
from src.pcis.core.logger import logger
from src.pcis.core.schema.config.config import ConfigModel, ExperimentModel
from src.pcis.tasks import experiment_tasks
from src.pcis.utils import format_validation_errors


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcis", description=f"{settings.PROJECT_NAME} {settings.VERSION}"
    )
    parser.add_argument("--config", default=settings.EXPERIMENT_CONFIG, help="YAML config")
    parser.add_argument("--output", default=None, help="Output directory")
    parser.add_argument("--seeds", type=int, nargs="+", default=None, help="Seed list")
    parser.add_argument("--beta-override", type=float, default=None)
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--horizon", type=int, default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    synthesize = commands.add_parser("synthesize", help="ConInv on a grow dataset")
    synthesize.add_argument("--dataset", type=Path, required=True)

    certify = commands.add_parser("certify", help="Certify a tentative mask")
    certify.add_argument("--mask", type=Path, required=True)
    certify.add_argument("--dataset", type=Path, required=True)

    train = commands.add_parser("train", help="Seeded shielded training")
    train.add_argument("--paired", action="store_true", help="Also run unshielded")
    train.add_argument("--no-shield", action="store_true")
    train.add_argument("--no-monotone-guard", action="store_true")
    train.add_argument("--step-budget", type=int, default=None)
    train.add_argument("--workers", type=int, default=None)

    verify = commands.add_parser("verify", help="Conservatism property suite")
    verify.add_argument("--trials", type=int, default=None)
    verify.add_argument("--verify-seed", type=int, default=None)

    export = commands.add_parser("export", help="Plot and input data")
    export.add_argument("--samples", type=int, default=1000)
    return parser


def apply_overrides(data: dict, args: argparse.Namespace) -> dict:
    """
    Fold command-line flags into the raw config tree so they are validated with it.
    :param data: The parsed YAML document.
    :param args: Parsed command line.
    :return: The updated document.
    """
    pcis = data.setdefault("pcis", {})
    confidence = pcis.setdefault("confidence", {})
    if args.seeds is not None:
        pcis["seeds"] = args.seeds
    if args.beta_override is not None:
        confidence["beta_override"] = args.beta_override
    if args.epsilon is not None:
        confidence["epsilon"] = args.epsilon
    if args.horizon is not None:
        confidence["horizon"] = args.horizon
    if args.command == "train":
        shield = pcis.setdefault("shield", {})
        if args.no_shield:
            shield["enabled"] = False
        if args.no_monotone_guard:
            shield["monotone_guard"] = False
        if args.step_budget is not None:
            pcis.setdefault("schedule", {})["step_budget"] = args.step_budget
    if args.command == "verify":
        verify = pcis.setdefault("verify", {})
        if args.trials is not None:
            verify["trials"] = args.trials
        if args.verify_seed is not None:
            verify["seed"] = args.verify_seed
    return data


def load_experiment(args: argparse.Namespace) -> ExperimentModel:
    with open(args.config) as f:
        data = yaml.safe_load(f) or {}
    return ConfigModel(**apply_overrides(data, args)).pcis


def run(args: argparse.Namespace) -> ExitCode:
    experiment = load_experiment(args)
    output_dir = Path(args.output or Path(settings.OUTPUT_DIR) / experiment.name)
    logger.info("[CLI]: Running '%s' for experiment '%s'.", args.command, experiment.name)

    match args.command:
        case "synthesize":
            return experiment_tasks.synthesize(experiment, args.dataset, output_dir)
        case "certify":
            return experiment_tasks.certify(experiment, args.mask, args.dataset, output_dir)
        case "train":
            return experiment_tasks.train(
                experiment, output_dir, paired=args.paired, max_workers=args.workers
            )
        case "verify":
            return experiment_tasks.verify(experiment, output_dir)
        case "export":
            return experiment_tasks.export(experiment, output_dir, args.samples)
    raise ValueError(f"Unknown command {args.command}.")


def main(argv: list[str] | None = None) -> int:
    """
    Parse the command line and run the command.
    :return: 0 on success, 1 on invalid config or input files, 2 on a failed property suite.
    """
    args = build_parser().parse_args(argv)
    try:
        return int(run(args))
    except ValidationError as exc:
        logger.error("[CLI]: Invalid configuration: %s", format_validation_errors(exc)["detail"])
    except (PcisError, OSError, yaml.YAMLError) as exc:
        logger.error("[CLI]: %s", exc)
    return int(ExitCode.VALIDATION_ERROR)


if __name__ == "__main__":
    sys.exit(main())

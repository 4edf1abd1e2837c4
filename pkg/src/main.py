"""
Command-line entry point for training and evaluation runs.
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from src.harness.config import DEFAULT_SEEDS
from src.harness.trials import DEFAULT_TRIAL_COUNT
from src.tools.analysis_tools import CompareTool, ReportImportanceTool
from src.tools.evaluation_tools import EvalTool, MakeTrialsTool, MarathonTool, RateSweepTool
from src.tools.training_tools import SuiteTool, TrainTool
from src.utils.logging_setup import configure_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csr", description="Curriculum sensing reduction experiments")
    parser.add_argument("--log-level", default=None, help="Overrides CSR_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="Train one experiment")
    train.add_argument("config", help="ExperimentConfig JSON file or experiment preset name")
    train.add_argument("--seed", type=int, default=None)
    train.add_argument("--output-dir", default=None)

    evaluate = sub.add_parser("eval", help="Evaluate a checkpoint on a trial set")
    evaluate.add_argument("checkpoint", help="Checkpoint path, or scripted:<env> / zero:<env>")
    evaluate.add_argument("trialset")

    importance = sub.add_parser("report-importance", help="Importance snapshot and events of a run")
    importance.add_argument("run")

    sweep = sub.add_parser("rate-sweep", help="Servo tracking at several command rates")
    sweep.add_argument("checkpoint", nargs="?", default=None)
    sweep.add_argument("--rates", type=float, nargs="+", required=True)
    sweep.add_argument("--seeds", type=int, default=5, help="Episodes per rate")
    sweep.add_argument("--duration", type=float, default=10.0)
    sweep.add_argument("--servo-env", default=None, help="Also sweep this preset's servo against a sinusoid")

    marathon = sub.add_parser("marathon", help="Goals reached in a fixed duration")
    marathon.add_argument("checkpoint")
    marathon.add_argument("--duration", type=float, default=30.0)
    marathon.add_argument("--seeds", type=int, default=10)
    marathon.add_argument("--trialset", default=None)

    compare = sub.add_parser("compare", help="Compare finished runs")
    compare.add_argument("runs", nargs="+")

    suite = sub.add_parser("suite", help="Train presets over several seeds")
    suite.add_argument("presets", nargs="+")
    suite.add_argument("--seeds", type=int, nargs="+", default=list(DEFAULT_SEEDS))
    suite.add_argument("--jobs", type=int, default=1)
    suite.add_argument("--overrides", default=None, help="JSON file of field overrides")
    suite.add_argument("--suite-dir", default=None)

    trials = sub.add_parser("make-trials", help="Write a frozen trial set")
    trials.add_argument("output")
    trials.add_argument("--size", type=int, default=DEFAULT_TRIAL_COUNT)
    trials.add_argument("--seed", type=int, default=0)
    trials.add_argument("--env", default=None)
    return parser


def dispatch(args: argparse.Namespace) -> Dict[str, Any]:
    """Run the tool for a parsed command line."""
    if args.command == "train":
        return TrainTool().execute(config=args.config, seed=args.seed, output_dir=args.output_dir)
    if args.command == "eval":
        return EvalTool().execute(checkpoint=args.checkpoint, trial_set=args.trialset)
    if args.command == "report-importance":
        return ReportImportanceTool().execute(run_dir=args.run)
    if args.command == "rate-sweep":
        return RateSweepTool().execute(
            checkpoint=args.checkpoint,
            rates=args.rates,
            n_seeds=args.seeds,
            duration=args.duration,
            servo_env=args.servo_env,
        )
    if args.command == "marathon":
        return MarathonTool().execute(
            checkpoint=args.checkpoint, duration=args.duration, n_seeds=args.seeds, trial_set=args.trialset
        )
    if args.command == "compare":
        return CompareTool().execute(run_dirs=args.runs)
    if args.command == "suite":
        return SuiteTool().execute(
            presets=args.presets, seeds=args.seeds, n_jobs=args.jobs, overrides=args.overrides, suite_dir=args.suite_dir
        )
    if args.command == "make-trials":
        return MakeTrialsTool().execute(output=args.output, size=args.size, seed=args.seed, env=args.env)
    raise ValueError(f"Unknown command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and print its JSON result."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    result = dispatch(args)
    if result["success"]:
        print(json.dumps(result["data"], indent=2, sort_keys=True, default=str))
        return 0
    error = {k: v for k, v in result.items() if k != "success"}
    print(json.dumps(error, sort_keys=True, default=str), file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())

"""
hebbian-duality command line: generate datasets, train online learners,
verify them against batch oracles and compare runs.

Exit codes: 0 success, 1 I/O or internal error (or failed verification),
2 usage / validation error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.table import Table

from config import Config
from core.dynamics import DynamicsConfig, FixedPointMode
from core.errors import DualityError, TrainingError
from core.logger import RunLogger, setup_logging
from datagen.dataset import Dataset
from datagen.generators import gen_classification, gen_regression, gen_spiked
from engines.learners import Hyper, LearnerModel, Schedule, SupervisedLearnerState
from engines.similarity_matching import OjaHyper, OjaState, SMHyper, SimilarityMatchingState
from engines.trainer import RunReport, train
from engines.verification import (
    SUMMARY_COLUMNS,
    CheckStatus,
    Tolerances,
    all_passed,
    flatten_summary_row,
    summary_row,
    summary_sort_key,
    verify_run,
)
from utils.helpers import format_metric, write_csv, write_json

console = Console()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Flags are individually valid but inconsistent with each other or with the inputs."""


# =============================================================================
# gen
# =============================================================================

def cmd_gen(args) -> int:
    if args.n < 1 or args.t < 1:
        raise UsageError("--n and --t must be at least 1")

    if args.kind == "regression":
        if args.noise < 0:
            raise UsageError("--noise must be nonnegative")
        dataset = gen_regression(args.n, args.t, args.noise, args.seed, args.positive_w)
        extra = f"noise={args.noise}"
    elif args.kind == "classification":
        if not args.margin > 0:
            raise UsageError("--margin must be positive")
        dataset = gen_classification(args.n, args.t, args.margin, args.seed)
        extra = f"margin={args.margin}"
    else:
        if args.m is None or not 1 <= args.m < args.n:
            raise UsageError(f"spiked data needs 1 <= --m < --n (got m={args.m}, n={args.n})")
        if not args.gap > 1:
            raise UsageError("--gap must exceed 1")
        dataset = gen_spiked(args.n, args.t, args.m, args.gap, args.seed)
        extra = f"m={args.m} gap={args.gap}"

    dataset.save(args.output)
    console.print(f"✓ {args.kind} dataset n={args.n} T={args.t} seed={args.seed} {extra} -> {args.output}")
    return EXIT_OK


# =============================================================================
# train
# =============================================================================

def _schedule(args) -> Schedule:
    if args.schedule == "inverse_time":
        return Schedule.inverse_time(args.decay)
    return Schedule.constant()


def _build_learner(args, dataset: Dataset):
    model = LearnerModel(args.model)
    if model.supervised:
        if not dataset.has_labels:
            raise UsageError(f"{model.value} needs labels; {dataset.meta.kind.value} data has none")
        if model.classification and not dataset.is_classification:
            raise UsageError(f"{model.value} needs +/-1 labels; use a classification dataset")
        try:
            hyper = Hyper(eta=args.eta, kappa=args.kappa, lam=args.lam, lambda_eff=args.lambda_eff,
                          normalize=args.normalize, relax_svm=args.relax_svm)
            return SupervisedLearnerState.initial(model, dataset.n, hyper)
        except DualityError as e:
            raise UsageError(str(e)) from e

    m = args.m if args.m is not None else (dataset.meta.m or 1)
    if not 1 <= m <= dataset.n:
        raise UsageError(f"--m must lie in [1, n={dataset.n}], got {m}")
    try:
        if model is LearnerModel.SM:
            eta_m = args.eta_m if args.eta_m is not None else args.eta
            hyper = SMHyper(eta_w=args.eta, eta_m=eta_m, m=m, mode=FixedPointMode(args.fixed_point))
            return SimilarityMatchingState.initial(dataset.n, hyper, seed=args.seed)
        return OjaState.initial(dataset.n, OjaHyper(eta=args.eta, m=m), seed=args.seed)
    except DualityError as e:
        raise UsageError(str(e)) from e


def cmd_train(args) -> int:
    dataset = Dataset.load(args.data)
    if args.epochs < 0:
        raise UsageError("--epochs must be nonnegative")
    try:
        schedule = _schedule(args)
        dynamics = DynamicsConfig(step=args.dyn_step, tol=args.dyn_tol, max_iters=args.dyn_max_iters)
    except DualityError as e:
        raise UsageError(str(e)) from e
    learner = _build_learner(args, dataset)

    run_logger = RunLogger(args.log_dir, label=f"train_{args.model}") if args.log_dir else None
    if run_logger:
        run_logger.log_event("run_started", {"model": args.model, "data": str(args.data), "epochs": args.epochs})

    report = train(
        learner,
        dataset,
        args.epochs,
        schedule=schedule,
        dynamics=dynamics,
        shuffle_seed=args.seed if args.shuffle else None,
        seed=args.seed,
        run_logger=run_logger,
    )
    report.save(args.output)
    csv_path = Path(args.csv) if args.csv else Path(args.output).with_suffix(".csv")
    report.save_csv(csv_path)

    final = report.final_epoch
    console.print(f"✓ {args.model}: {args.epochs} epochs, train_error={format_metric(final.train_error)}, "
                  f"update_density={format_metric(final.update_density)} -> {args.output}")
    if run_logger:
        run_logger.save_final_summary({"report": str(args.output), "csv": str(csv_path),
                                       "final_epoch": {k: v for k, v in final.to_dict().items() if k != 'z'}})
    return EXIT_OK


# =============================================================================
# verify
# =============================================================================

def cmd_verify(args) -> int:
    dataset = Dataset.load(args.data)
    report = RunReport.load(args.report)
    try:
        LearnerModel(report.model)
    except ValueError as e:
        raise UsageError(f"{args.report}: unknown model '{report.model}'") from e

    tol = Tolerances(weights=args.tol_weights, gap=args.tol_gap, kkt=args.tol_kkt,
                     subspace=args.tol_subspace, mse=args.tol_mse)
    run_logger = RunLogger(args.log_dir, label=f"verify_{report.model}") if args.log_dir else None
    checks = verify_run(report, dataset, tol, run_logger)

    table = Table(title=f"Verification: {report.model}")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Value", justify="right")
    table.add_column("Threshold", justify="right")
    colours = {CheckStatus.PASS: "green", CheckStatus.FAIL: "red", CheckStatus.SKIPPED: "yellow",
               CheckStatus.INFO: "dim"}
    for check in checks:
        colour = colours[check.status]
        table.add_row(check.name, f"[{colour}]{check.status.value}[/{colour}]",
                      format_metric(check.value), format_metric(check.threshold))
    console.print(table)

    passed = all_passed(checks)
    if args.output:
        write_json(args.output, {"model": report.model, "passed": passed,
                                 "checks": [check.to_dict() for check in checks]})
    if run_logger:
        run_logger.save_final_summary({"passed": passed, "checks": [check.to_dict() for check in checks]})
    console.print("[bold green]✅ all checks passed[/bold green]" if passed
                  else "[bold red]❌ verification failed[/bold red]")
    return EXIT_OK if passed else EXIT_ERROR


# =============================================================================
# report
# =============================================================================

def cmd_report(args) -> int:
    rows = []
    for path in args.reports:
        try:
            report = RunReport.load(path)
        except (OSError, ValueError) as e:
            console.print(f"[red]❌ {path}: {e}[/red]")
            return EXIT_ERROR
        rows.append(summary_row(report, str(path)))
    rows.sort(key=summary_sort_key)

    fmt = args.format or ("json" if str(args.output).endswith(".json") else "csv")
    if fmt == "json":
        write_json(args.output, {"runs": rows})
    else:
        write_csv(args.output, [flatten_summary_row(row) for row in rows], SUMMARY_COLUMNS)

    table = Table(title="Run comparison")
    for column in ("model", "seed", "epochs", "primal_objective", "duality_gap", "update_density",
                   "train_error", "oracle_distance", "subspace_error"):
        table.add_column(column)
    for row in rows:
        table.add_row(row["model"], str(row["seed"]), str(row["epochs"]),
                      *(format_metric(row[c]) for c in ("primal_objective", "duality_gap", "update_density",
                                                        "train_error", "oracle_distance", "subspace_error")))
    console.print(table)
    console.print(f"✓ {len(rows)} run(s) summarized -> {args.output}")
    return EXIT_OK


# =============================================================================
# Entry point
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=Config.TOOL_NAME,
        description="Primal-dual Hebbian learners with batch-oracle verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  main.py gen --kind regression --n 5 --t 50 --noise 0.1 --seed 42 -o data.json
  main.py train --model ridge --epochs 500 --eta 0.1 --lambda 0.1 --lambda-eff 0.1 \\
          --schedule inverse_time --decay 0.02 --data data.json -o run.json
  main.py verify --data data.json --report run.json
  main.py report run.json other.json -o summary.csv
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a seeded synthetic dataset")
    gen.add_argument("--kind", choices=["regression", "classification", "spiked"], required=True)
    gen.add_argument("--n", type=int, required=True, help="Feature dimension")
    gen.add_argument("--t", type=int, required=True, help="Number of samples")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise", type=float, default=0.0, help="Regression label noise (default: 0)")
    gen.add_argument("--positive-w", action="store_true", help="Regression: strictly positive planted weights")
    gen.add_argument("--margin", type=float, default=0.5, help="Classification margin (default: 0.5)")
    gen.add_argument("--m", type=int, default=None, help="Spiked: dimension of the planted subspace")
    gen.add_argument("--gap", type=float, default=4.0, help="Spiked: eigenvalue ratio (default: 4)")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(handler=cmd_gen)

    tr = sub.add_parser("train", help="Train an online learner on a dataset")
    tr.add_argument("--model", choices=[m.value for m in LearnerModel], required=True)
    tr.add_argument("--epochs", type=int, required=True)
    tr.add_argument("--eta", type=float, default=0.1, help="Learning rate (eta_w for sm)")
    tr.add_argument("--kappa", type=float, default=1.0)
    tr.add_argument("--lambda", dest="lam", type=float, default=1.0, help="Regularizer strength for objectives")
    tr.add_argument("--lambda-eff", type=float, default=0.0, help="Ridge weight decay in the plasticity rule")
    tr.add_argument("--eta-m", type=float, default=None, help="Lateral learning rate for sm (default: --eta)")
    tr.add_argument("--m", type=int, default=None, help="Output dimension for sm/oja (default: dataset m)")
    tr.add_argument("--schedule", choices=["constant", "inverse_time"], default="constant")
    tr.add_argument("--decay", type=float, default=0.0, help="inverse_time decay per step")
    tr.add_argument("--seed", type=int, default=0, help="Initialization / shuffling seed")
    tr.add_argument("--shuffle", action="store_true", help="Seeded reshuffle of samples every epoch")
    tr.add_argument("--normalize", action="store_true", help="expgrad: keep total weight mass fixed")
    tr.add_argument("--relax-svm", action="store_true", help="svm: settle activity by relaxation")
    tr.add_argument("--fixed-point", choices=[m.value for m in FixedPointMode], default="solve",
                    help="sm: settle M z = W x by relaxation or direct solve (default: solve)")
    tr.add_argument("--dyn-step", type=float, default=Config.DYNAMICS_STEP)
    tr.add_argument("--dyn-tol", type=float, default=Config.DYNAMICS_TOL)
    tr.add_argument("--dyn-max-iters", type=int, default=Config.DYNAMICS_MAX_ITERS)
    tr.add_argument("--data", required=True)
    tr.add_argument("-o", "--output", required=True, help="Run report JSON")
    tr.add_argument("--csv", default=None, help="Per-epoch CSV (default: report path with .csv)")
    tr.add_argument("--log-dir", nargs="?", const=str(Config.DEFAULT_LOG_DIR), default=None,
                    help=f"Write a timestamped session log here (bare flag: {Config.DEFAULT_LOG_DIR})")
    tr.set_defaults(handler=cmd_train)

    ve = sub.add_parser("verify", help="Check a run against batch oracles")
    ve.add_argument("--data", required=True)
    ve.add_argument("--report", required=True)
    ve.add_argument("--tol-weights", type=float, default=Config.TOL_WEIGHTS)
    ve.add_argument("--tol-gap", type=float, default=Config.TOL_GAP)
    ve.add_argument("--tol-kkt", type=float, default=Config.TOL_KKT)
    ve.add_argument("--tol-subspace", type=float, default=Config.TOL_SUBSPACE)
    ve.add_argument("--tol-mse", type=float, default=Config.TOL_MSE)
    ve.add_argument("-o", "--output", default=None, help="Optional JSON file of check results")
    ve.add_argument("--log-dir", nargs="?", const=str(Config.DEFAULT_LOG_DIR), default=None)
    ve.set_defaults(handler=cmd_verify)

    rp = sub.add_parser("report", help="Merge run reports into a comparison table")
    rp.add_argument("reports", nargs="+")
    rp.add_argument("-o", "--output", required=True)
    rp.add_argument("--format", choices=["csv", "json"], default=None)
    rp.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(args.verbose)
    try:
        Config.validate()
        return args.handler(args)
    except UsageError as e:
        console.print(f"[red]❌ {e}[/red]")
        return EXIT_USAGE
    except TrainingError as e:
        console.print(f"[red]❌ training aborted: {e}[/red]")
        return EXIT_ERROR
    except json.JSONDecodeError as e:
        console.print(f"[red]❌ malformed JSON: {e}[/red]")
        return EXIT_ERROR
    except OSError as e:
        console.print(f"[red]❌ I/O error: {e}[/red]")
        return EXIT_ERROR
    except (DualityError, ValueError) as e:
        console.print(f"[red]❌ {type(e).__name__}: {e}[/red]")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

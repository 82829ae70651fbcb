"""
Command-line entry point of the benchmark engine.

Subcommands:
- run:       execute a RunConfig and cache the report
- report:    print the summary table of a cached report (or tensor file)
- pairwise:  print the per-task pairwise table
- cd:        print the Friedman/Nemenyi analysis, optionally writing the SVG diagram
- export:    write LaTeX tables or SVG figures
- calibrate: Monte-Carlo FWER / clique-coverage / power calibration

Read commands never run trials: every artifact is regenerated from the cached report.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

# Add SHARED to Python path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "SHARED"))

from bench_sdk import __version__  # noqa: E402
from bench_sdk.config_loader import load_run_config, load_system_config  # noqa: E402
from bench_sdk.config_models import RunConfig, SystemConfig  # noqa: E402
from bench_sdk.latex import LatexOptions, to_latex  # noqa: E402
from bench_sdk.logger import JsonLogger, setup_logger  # noqa: E402
from bench_sdk.models import decode_tensor, load_tensor_csv  # noqa: E402
from bench_sdk.protocol import (  # noqa: E402
    BenchmarkError,
    ConfigError,
    ErrorCode,
    InvalidArgumentError,
    TrialFailedError,
)
from bench_sdk.render import CdDiagramStyle, render_cd_svg, render_cells_svg, render_pairwise_svg  # noqa: E402
from bench_sdk.report import (  # noqa: E402
    BenchmarkReport,
    CellMark,
    build_report,
    mark_cells,
    pairwise_table,
    summary_table,
    with_config,
)
from bench_sdk.repositories import (  # noqa: E402
    CACHE_KIND,
    DATA_ROOT,
    CalibrationRepository,
    atomic_write,
    cache_load,
    cache_save,
)
from bench_sdk.utils import format_delta, format_pvalue  # noqa: E402
from harness.calibration.montecarlo import (  # noqa: E402
    estimate_clique_coverage,
    estimate_fwer,
    estimate_power,
)
from harness.executors.external import ExternalCommandExecutor  # noqa: E402
from harness.executors.synthetic import SyntheticExecutor  # noqa: E402
from harness.runner.orchestrator import run_benchmark  # noqa: E402
from harness.runner.registry import Registry, load_registry  # noqa: E402

_MARK_SUFFIX = {
    CellMark.WINNER: " *",
    CellMark.TIE: " ~",
    CellMark.PLAIN: "",
    CellMark.INCOMPATIBLE: "",
}


class UsageError(Exception):
    """Raised by the argument parser instead of exiting."""


class BenchArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exit code 1 through main()."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: error: {message}")


# ============================================================================
# ARGUMENT PARSING
# ============================================================================


def _seed_list(text: str) -> List[int]:
    """Parse "0,1,2" or "0-9" (inclusive) into a seed list."""
    seeds: List[int] = []
    try:
        for part in filter(None, (p.strip() for p in text.split(","))):
            lo, sep, hi = part.partition("-")
            if sep:
                seeds.extend(range(int(lo), int(hi) + 1))
            else:
                seeds.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list: {text!r}")
    if not seeds or len(set(seeds)) != len(seeds):
        raise argparse.ArgumentTypeError(f"seed list must be non-empty and distinct: {text!r}")
    return seeds


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha: {text!r}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {text}")
    return value


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list: {text!r}")


def build_parser(system: SystemConfig) -> BenchArgumentParser:
    default_cache = str(Path(system.cache.cache_dir) / system.cache.report_filename)
    parser = BenchArgumentParser(
        prog="bench",
        description="Seed-paired statistical comparison of models across benchmark tasks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Run the bundled cross-category demo and cache its report
  bench run --config SHARED/config/runs/cross_category_demo.json --out report.json

  # Summary and pairwise tables from the cache (no trials are re-run)
  bench report --in report.json
  bench pairwise --in report.json --method wilcoxon

  # Critical-difference analysis and diagram
  bench cd --in report.json --alpha 0.05 --svg cd.svg

  # LaTeX export and the pairwise p-value matrix
  bench export --in report.json --format latex --which pairwise --out pairwise.tex
  bench export --in report.json --format svg --which pairwise --method wilcoxon --out pairwise.svg

  # FWER calibration
  bench calibrate --runs 2000 --alpha 0.05 --method t

Environment Variables:
  BENCH_CACHE_DIR          Default report cache directory
  BENCH_PARALLELISM        Default concurrent trials
  BENCH_TRIAL_TIMEOUT_SEC  Default external trial timeout
  BENCH_REGISTRY_PATH      Task/model catalog file
  LOG_LEVEL                Log level
  BENCH_LOG_ROOT           Log directory root

Configuration Priority:
  CLI args > Environment variables > Config files > Defaults

Exit Codes:
  0 - Success
  1 - Usage error (invalid arguments)
  2 - Data/validation error (missing file, invalid tensor or config, cache mismatch)
  3 - Trial failure (the failing task, model and seed are reported)
""",
    )
    parser.add_argument("--version", action="version", version=f"bench {__version__}")
    parser.add_argument(
        "--system-config", type=str, default=None, help="Path to system.json (default: SHARED/config)"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=BenchArgumentParser)

    def add_input(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--in",
            dest="input",
            default=default_cache,
            help="Report cache, tensor JSON or tensor CSV (default: %(default)s)",
        )
        p.add_argument("--tasks", dest="tasks_sidecar", help="Task-spec JSON sidecar for CSV input")
        p.add_argument("--json", action="store_true", help="Machine-readable JSON output")

    run = sub.add_parser("run", help="Execute a benchmark run and cache the report")
    run.add_argument("--config", required=True, help="RunConfig JSON file")
    run.add_argument("--out", help="Report cache path (default: config cache_path or cache dir)")
    run.add_argument("--seed-list", type=_seed_list, help="Seeds, e.g. 0-9 or 0,1,2 (default: config)")
    run.add_argument("--alpha", type=_alpha, help="Override the report significance level")
    run.add_argument("--parallelism", type=int, help="Concurrent trials (env: BENCH_PARALLELISM)")
    run.add_argument("--registry", help="Task/model catalog (env: BENCH_REGISTRY_PATH)")
    run.add_argument("--json", action="store_true", help="Machine-readable JSON output")

    report = sub.add_parser("report", help="Print the summary table")
    add_input(report)
    report.add_argument("--ci-method", choices=["t", "bootstrap"], help="Override the CI method")
    report.add_argument("--alpha", type=_alpha, help="Override the significance level")

    pairwise = sub.add_parser("pairwise", help="Print the per-task pairwise table")
    add_input(pairwise)
    pairwise.add_argument("--method", choices=["t", "wilcoxon", "both"], help="Pairwise test")
    pairwise.add_argument("--alpha", type=_alpha, help="Override the significance level")

    cd = sub.add_parser("cd", help="Friedman test, Nemenyi CD and cliques")
    add_input(cd)
    cd.add_argument("--alpha", type=_alpha, help="Nemenyi level (0.05 or 0.10)")
    cd.add_argument("--svg", help="Write the CD diagram to this file")

    export = sub.add_parser("export", help="Export LaTeX tables or SVG figures")
    add_input(export)
    export.add_argument("--format", required=True, choices=["latex", "svg"])
    export.add_argument("--which", required=True, choices=["summary", "pairwise", "cd", "cells"])
    export.add_argument("--task", help="Task of the cells panel")
    export.add_argument("--method", choices=["t", "wilcoxon", "both"], help="Pairwise test (default: the report's pairwise_method)")
    export.add_argument("--out", help="Output file (default: stdout)")

    calibrate = sub.add_parser("calibrate", help="Monte-Carlo calibration")
    calibrate.add_argument("--runs", type=int, required=True)
    calibrate.add_argument("--alpha", type=_alpha, default=0.05)
    calibrate.add_argument("--method", choices=["t", "wilcoxon"], default="t")
    calibrate.add_argument(
        "--kind", choices=["fwer", "clique-coverage", "power"], default="fwer", help="Experiment"
    )
    calibrate.add_argument("--models", "-k", dest="k", type=int, default=4)
    calibrate.add_argument("--n-tasks", dest="n_tasks", type=int, default=1)
    calibrate.add_argument("--seeds", dest="n_seeds", type=int, default=10)
    calibrate.add_argument("--noise-sd", type=float, default=1.0)
    calibrate.add_argument("--gaps", type=_float_list, default=[0.0, 0.5, 1.0], help="Power grid")
    calibrate.add_argument("--seed", type=int, default=0)
    calibrate.add_argument("--workers", type=int, default=1)
    calibrate.add_argument("--out", help="Write the result JSON here")
    calibrate.add_argument("--save-as", help="Store under <data-root>/calibration/<name>.json")
    calibrate.add_argument(
        "--data-root", default=str(DATA_ROOT), help="Data root of --save-as (default: %(default)s)"
    )
    calibrate.add_argument("--json", action="store_true", help="Machine-readable JSON output")
    return parser


# ============================================================================
# INPUT
# ============================================================================


def load_input(
    args: argparse.Namespace, system: SystemConfig, json_logger: Optional[JsonLogger] = None
) -> BenchmarkReport:
    """Load a report cache, or build a report from a tensor JSON/CSV file."""
    path = Path(args.input)
    if not path.exists():
        raise FileNotFoundError(f"Input not found: {path}")
    if path.suffix.lower() == ".csv":
        if not args.tasks_sidecar:
            raise InvalidArgumentError("CSV input needs --tasks <task-spec JSON>")
        return build_report(load_tensor_csv(path, args.tasks_sidecar), system.report)

    try:
        head = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        # let the cache loader classify it
        return cache_load(path)
    if isinstance(head, dict) and "cells" in head and head.get("kind") != CACHE_KIND:
        return build_report(decode_tensor(head), system.report)
    report = cache_load(path)
    if json_logger:
        json_logger.info(f"Report cache loaded from {path}", event_type="CACHE_LOADED", path=str(path))
    return report


def _override(report: BenchmarkReport, **changes: Any) -> BenchmarkReport:
    changes = {k: v for k, v in changes.items() if v is not None}
    if not changes or all(getattr(report.config, k) == v for k, v in changes.items()):
        return report
    return with_config(report, **changes)


def _emit_json(data: Any) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


def _write_text(path: str, text: str) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.with_name(f".{out.name}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, out)


# ============================================================================
# COMMANDS
# ============================================================================


def summary_frame(report: BenchmarkReport) -> pd.DataFrame:
    rows = summary_table(report)
    models = list(report.tensor.models)
    records: List[Dict[str, str]] = []
    for spec in report.tensor.tasks:
        record = {"Category": spec.category, "Task": f"{spec.name} {spec.direction.arrow}"}
        for row in rows:
            if row.task == spec.name:
                record[row.model] = row.text + _MARK_SUFFIX[row.mark]
        records.append(record)
    return pd.DataFrame.from_records(records, columns=["Category", "Task"] + models)


def pairwise_frame(report: BenchmarkReport, method: str) -> pd.DataFrame:
    records = []
    for row in pairwise_table(report, method):
        record = {"Task": row.task, "Comparison": row.pair, "Δμ": format_delta(row.delta_mu)}
        if method in ("t", "both"):
            record["p_Holm(t)"] = format_pvalue(row.p_holm_t)
        if method in ("wilcoxon", "both"):
            record["p_Holm(W)"] = format_pvalue(row.p_holm_w)
        if method == "both":
            record["Agree"] = "yes" if row.agree else "no"
        records.append(record)
    return pd.DataFrame.from_records(records)


def cmd_run(args: argparse.Namespace, system: SystemConfig, json_logger: JsonLogger) -> int:
    config: RunConfig = load_run_config(args.config)
    updates: Dict[str, Any] = {}
    if args.seed_list:
        updates["seeds"] = args.seed_list
    if args.alpha is not None:
        updates["alpha"] = args.alpha
    if updates:
        config = RunConfig.model_validate({**config.model_dump(), **updates})

    # a run made only of custom tasks and custom models needs no catalog
    self_contained = (
        config.category is None
        and config.tasks is None
        and bool(config.custom_tasks)
        and not config.models
        and bool(config.custom_models)
    )
    registry_path = args.registry or system.runner.registry_path
    registry = Registry() if self_contained else load_registry(registry_path)

    settings = config.executor
    if settings.kind == "external":
        executor = ExternalCommandExecutor(
            settings.command or "", timeout_sec=settings.timeout_sec or system.runner.trial_timeout_sec
        )
    else:
        if settings.profile is None:
            raise ConfigError("synthetic executor requires executor.profile in the run config")
        executor = SyntheticExecutor(settings.profile)

    parallelism = args.parallelism or settings.parallelism or system.runner.parallelism
    run_logger = JsonLogger(
        component="runner",
        run_id=config.run_id,
        min_level=system.logging.level,
        log_root=Path(system.logging.log_root),
    )
    report = run_benchmark(config, registry, executor, parallelism=parallelism, json_logger=run_logger)

    out = args.out or config.cache_path or str(Path(system.cache.cache_dir) / f"{config.run_id}.json")
    if out != config.cache_path:
        cache_save(report, out)
    json_logger.info(f"Report cached at {out}", event_type="CACHE_SAVED", path=str(out))

    if args.json:
        _emit_json({"cache": str(out), "provenance": report.provenance.model_dump(mode="json")})
    else:
        print(summary_frame(report).to_string(index=False))
        print(f"\nReport cached at {out}")
    return ErrorCode.EXIT_OK


def cmd_report(args: argparse.Namespace, system: SystemConfig, json_logger: JsonLogger) -> int:
    report = _override(load_input(args, system, json_logger), ci_method=args.ci_method, alpha=args.alpha)
    if args.json:
        _emit_json([row.model_dump(mode="json") for row in summary_table(report)])
        return ErrorCode.EXIT_OK
    print(summary_frame(report).to_string(index=False))
    config = report.config
    print(f"\n* winner  ~ interval overlaps the winner  ({config.ci_method} CI, alpha={config.alpha:g})")
    tie_broken = [t for t in report.tensor.task_names if mark_cells(report, t).tie_broken]
    if tie_broken:
        print(f"exact mean ties broken by registry order: {', '.join(tie_broken)}")
    return ErrorCode.EXIT_OK


def cmd_pairwise(args: argparse.Namespace, system: SystemConfig, json_logger: JsonLogger) -> int:
    report = _override(load_input(args, system, json_logger), alpha=args.alpha)
    method = args.method or report.config.pairwise_method
    if args.json:
        _emit_json([row.model_dump(mode="json") for row in pairwise_table(report, method)])
        return ErrorCode.EXIT_OK
    frame = pairwise_frame(report, method)
    print(frame.to_string(index=False) if not frame.empty else "(no pairwise comparisons)")
    return ErrorCode.EXIT_OK


def _require_cd(report: BenchmarkReport):
    if report.cd is None:
        raise InvalidArgumentError(
            "No critical-difference analysis for this report (needs >= 2 tasks, 2..20 models "
            "present on every task, alpha 0.05 or 0.10)",
            details={"alpha": report.config.alpha},
        )
    return report.cd


def _cd_style(system: SystemConfig) -> CdDiagramStyle:
    render = system.render
    return CdDiagramStyle(scale_multiplier=render.scale_multiplier, precision=render.precision)


def cmd_cd(args: argparse.Namespace, system: SystemConfig, json_logger: JsonLogger) -> int:
    report = _override(load_input(args, system, json_logger), alpha=args.alpha)
    cd = _require_cd(report)
    if args.svg:
        _write_text(args.svg, render_cd_svg(cd, _cd_style(system)))
    if args.json:
        data = cd.model_dump(mode="json")
        data["clique_names"] = cd.clique_names()
        _emit_json(data)
        return ErrorCode.EXIT_OK
    frame = pd.DataFrame(
        {"Model": list(cd.models), "Mean rank": [f"{r:.2f}" for r in cd.mean_ranks]}
    ).sort_values("Mean rank", kind="stable")
    print(frame.to_string(index=False))
    print(f"\nFriedman chi2({cd.k - 1}) = {cd.chi2_friedman:.2f} (p = {cd.p_friedman:.3f}), N = {cd.N}")
    print(f"CD_{cd.alpha:g} = {cd.cd:.2f} rank units")
    for clique in cd.clique_names():
        print(f"clique: {', '.join(clique)}")
    if args.svg:
        print(f"CD diagram written to {args.svg}")
    return ErrorCode.EXIT_OK


def cmd_export(args: argparse.Namespace, system: SystemConfig, json_logger: JsonLogger) -> int:
    report = load_input(args, system, json_logger)
    if args.format == "latex":
        if args.which not in ("summary", "pairwise"):
            raise InvalidArgumentError(f"LaTeX export supports summary|pairwise, not {args.which}")
        text = to_latex(report, args.which, LatexOptions(pairwise_method=args.method))
    elif args.which == "cd":
        text = render_cd_svg(_require_cd(report), _cd_style(system))
    elif args.which == "cells":
        if not args.task:
            raise InvalidArgumentError("--which cells needs --task")
        report.tensor.task(args.task)
        text = render_cells_svg([r for r in summary_table(report) if r.task == args.task])
    elif args.which == "pairwise":
        text = render_pairwise_svg(report, args.method)
    else:
        raise InvalidArgumentError(f"SVG export supports cd|cells|pairwise, not {args.which}")

    if args.out:
        _write_text(args.out, text)
        if args.json:
            _emit_json({"written": args.out, "format": args.format, "which": args.which})
    else:
        sys.stdout.write(text)
    return ErrorCode.EXIT_OK


def cmd_calibrate(args: argparse.Namespace, json_logger: JsonLogger) -> int:
    if args.runs < 1:
        raise InvalidArgumentError(f"--runs must be >= 1, got {args.runs}")
    if args.kind == "power":
        result = estimate_power(
            args.gaps, args.runs, args.n_seeds, args.noise_sd, args.alpha, args.seed
        )
    elif args.kind == "clique-coverage":
        result = estimate_clique_coverage(
            args.runs,
            args.k,
            args.n_tasks,
            args.n_seeds,
            args.noise_sd,
            args.alpha,
            args.seed,
            args.workers,
        )
    else:
        result = estimate_fwer(
            args.runs,
            args.k,
            args.n_tasks,
            args.n_seeds,
            args.noise_sd,
            args.alpha,
            args.method,
            args.seed,
            args.workers,
        )
    data = result.model_dump(mode="json")
    if args.out:
        atomic_write(args.out, data)
    if args.save_as:
        CalibrationRepository(args.save_as, data_root=Path(args.data_root)).save(result)
    json_logger.info("Calibration completed", event_type="CALIBRATION_COMPLETED", data=data)
    _emit_json(data)
    return ErrorCode.EXIT_OK


# ============================================================================
# ENTRY POINT
# ============================================================================


def _report_error(exc: BaseException, code: str, as_json: bool, json_logger: JsonLogger) -> None:
    message = str(exc)
    print(f"error [{code}]: {message}", file=sys.stderr)
    if isinstance(exc, TrialFailedError) and exc.stderr:
        print(exc.stderr.rstrip(), file=sys.stderr)
    details = exc.details if isinstance(exc, BenchmarkError) else {}
    if as_json:
        print(
            json.dumps({"error_code": code, "message": message, "details": details}, default=str),
            file=sys.stderr,
        )
    json_logger.log_error_event(code, message, details, exit_code=ErrorCode.exit_code(code))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        system = load_system_config(_peek_system_config(argv))
    except (BenchmarkError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ErrorCode.EXIT_DATA

    parser = build_parser(system)
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return ErrorCode.EXIT_USAGE

    log_root = Path(system.logging.log_root)
    json_logger = JsonLogger(component="cli", min_level=system.logging.level, log_root=log_root)
    setup_logger(
        "harness",
        json_logger.log_file.with_name("harness.log.jsonl"),
        level=getattr(logging, system.logging.level),
        max_bytes=system.logging.max_file_size_mb * 1024 * 1024,
        backup_count=system.logging.backup_count,
    )
    as_json = bool(getattr(args, "json", False))

    try:
        if args.command == "run":
            return cmd_run(args, system, json_logger)
        if args.command == "report":
            return cmd_report(args, system, json_logger)
        if args.command == "pairwise":
            return cmd_pairwise(args, system, json_logger)
        if args.command == "cd":
            return cmd_cd(args, system, json_logger)
        if args.command == "export":
            return cmd_export(args, system, json_logger)
        return cmd_calibrate(args, json_logger)
    except BenchmarkError as exc:
        _report_error(exc, exc.error_code, as_json, json_logger)
        return ErrorCode.exit_code(exc.error_code)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        _report_error(exc, ErrorCode.INVALID_ARGUMENT, as_json, json_logger)
        return ErrorCode.EXIT_DATA
    except ValidationError as exc:
        _report_error(exc, ErrorCode.CONFIG_INVALID, as_json, json_logger)
        return ErrorCode.EXIT_DATA


def _peek_system_config(argv: Sequence[str]) -> Optional[str]:
    for i, arg in enumerate(argv):
        if arg == "--system-config" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--system-config="):
            return arg.split("=", 1)[1]
    return None


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    main_entry()

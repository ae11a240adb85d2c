"""Command-line interface: estimate, sweep, synth and benchmark."""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from fishersep import __version__
from fishersep.config import Settings, configure_logging, get_settings
from fishersep.errors import FisherSepError, FullySeparableError, UsageError
from fishersep.ingest import (
    load_matrix,
    normalize_with_summary,
    save_matrix,
    write_point_table,
    write_sweep_table,
    write_table,
)
from fishersep.models import (
    AlphaGrid,
    Battery,
    Delimiter,
    DimensionEstimate,
    InputSummary,
    ManifoldKind,
    MatrixFile,
    PointsIn,
    PreprocessConfig,
    PreprocessSummary,
    RunReport,
    SweepRow,
    SyntheticSpec,
    minimal_embedding,
)
from fishersep.plots import dimension_profile_svg, histogram_svg, separability_curves_svg
from fishersep.preprocess import preprocess
from fishersep.scoring import BENCHMARK_COLUMNS, benchmark_table, run_battery
from fishersep.separability import alpha_sweep, select_estimate
from fishersep.synthdata import default_battery, generate

logger = logging.getLogger(__name__)

DEFAULT_INTRINSIC_DIM = 10


def _alpha_grid(text: str) -> AlphaGrid:
    try:
        return AlphaGrid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid alpha grid {text!r}: {exc}") from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fishersep", description="Intrinsic dimension from Fisher separability")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="overrides FISHERSEP_LOG_LEVEL")

    runtime = argparse.ArgumentParser(add_help=False)
    runtime.add_argument("--block-size", type=_positive_int, default=None, help="rows per pairwise block")
    runtime.add_argument("--threads", type=_positive_int, default=None)
    runtime.add_argument("--out-dir", default=None)
    runtime.add_argument("--format", choices=["json", "text"], default="text", dest="output_format")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", required=True, help="CSV/TSV matrix")
    data.add_argument("--delimiter", type=Delimiter, choices=list(Delimiter), default=Delimiter.comma)
    data.add_argument("--points-in", type=PointsIn, choices=list(PointsIn), default=PointsIn.rows)
    data.add_argument("--header", action="store_true", help="first line holds column names")
    data.add_argument("--alphas", type=_alpha_grid, default=None, help="lo:hi:step (default 0.6:0.98:0.02)")
    data.add_argument("--condition-threshold", type=float, default=10.0)
    data.add_argument("--no-sphere", action="store_true", help="skip the projection onto the unit sphere")
    data.add_argument("--mutation-preprocess", action="store_true", help="genes x tumors count matrix")
    data.add_argument("--min-count", type=int, default=5)
    data.add_argument("--seed", type=int, default=None, help="recorded in the report")
    data.add_argument("--no-svg", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("estimate", parents=[data, runtime], help="estimate the effective dimension")
    sub.add_parser("sweep", parents=[data, runtime], help="mean unseparability over the alpha grid")

    synth = sub.add_parser("synth", parents=[runtime], help="write a synthetic dataset")
    synth.add_argument("--config", default=None, help="SyntheticSpec as JSON")
    synth.add_argument("--kind", type=ManifoldKind, choices=list(ManifoldKind), default=None)
    synth.add_argument("--n", type=int, default=None, help="intrinsic dimension")
    synth.add_argument("--D", type=int, default=None, dest="embed_dim", help="embedding dimension")
    synth.add_argument("--N", type=int, default=2500, dest="cardinality", help="number of points")
    synth.add_argument("--sigma", type=float, default=0.0)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--radius", type=float, default=0.1, help="cluster radius")
    synth.add_argument("--fraction", type=float, default=0.5, help="share of points in clusters")
    synth.add_argument("--clusters", type=int, default=10)
    synth.add_argument("--rotate", action="store_true")
    synth.add_argument("--out", default=None, help="output CSV (default <out-dir>/<name>.csv)")

    bench = sub.add_parser("benchmark", parents=[runtime], help="score FisherS and CD on a dataset battery")
    bench.add_argument("--config", default=None, help="Battery as JSON (default: built-in battery)")
    return parser


def _out_dir(args: argparse.Namespace, settings: Settings) -> Path:
    path = Path(args.out_dir or settings.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ── estimate / sweep ─────────────────────────────────────────


def _build_report(args, settings, f, x_shape, mutation, cloud, grid, profiles, estimate, timing) -> RunReport:
    lam = cloud.retained_eigenvalues
    return RunReport(
        version=__version__,
        input=InputSummary(
            path=f.path,
            delimiter=f.delimiter,
            points_in=f.points_in,
            header=f.header,
            n_points=x_shape[0],
            n_features=x_shape[1],
        ),
        mutation=mutation,
        preprocessing=PreprocessSummary(
            k=cloud.k,
            condition_threshold=args.condition_threshold,
            on_sphere=cloud.on_sphere,
            retained_eigenvalues=[float(v) for v in lam],
            eigenvalue_ratios=[float(v / lam[0]) for v in lam],
        ),
        alphas=grid.values,
        sweep=[SweepRow(alpha=p.alpha, mean_prob=p.mean_prob, dimension=p.dimension) for p in profiles],
        alpha_max=estimate.alpha_max if estimate else None,
        alpha_used=estimate.alpha_used if estimate else None,
        n_hat=estimate.n_hat if estimate else None,
        fallback=estimate.fallback if estimate else False,
        block_size=args.block_size or settings.block_size,
        threads=args.threads or settings.threads,
        seed=args.seed,
        timing=timing,
    )


def _print_report(report: RunReport, output_format: str) -> None:
    if output_format == "json":
        print(report.model_dump_json(indent=2))
        return
    print(f"points x features: {report.input.n_points} x {report.input.n_features}, retained k: {report.preprocessing.k}")
    for row in report.sweep:
        dimension = f"{row.dimension:.4f}" if row.dimension is not None else "-"
        print(f"alpha={row.alpha:.2f}  mean_p={row.mean_prob:.6g}  n_alpha={dimension}")
    if report.n_hat is not None:
        print(f"n_hat={report.n_hat:.4f} (alpha_used={report.alpha_used:.2f}, alpha_max={report.alpha_max:.2f})")


def run_analysis(args: argparse.Namespace, settings: Settings, point_table: bool) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args, settings)
    block_size = args.block_size or settings.block_size
    threads = args.threads or settings.threads

    f = MatrixFile(path=args.input, delimiter=args.delimiter, points_in=args.points_in, header=args.header)
    x = load_matrix(f)
    mutation = None
    if args.mutation_preprocess:
        x, mutation = normalize_with_summary(x, args.min_count)
    loaded = time.perf_counter()

    cfg = PreprocessConfig(condition_threshold=args.condition_threshold, project_to_sphere=not args.no_sphere)
    grid = args.alphas or AlphaGrid()
    cloud = preprocess(x, cfg)
    preprocessed = time.perf_counter()
    profiles = alpha_sweep(cloud, grid, block_size, threads, allow_off_sphere=args.no_sphere)
    swept = time.perf_counter()

    estimate: Optional[DimensionEstimate] = None
    try:
        estimate = select_estimate(profiles)
    except FullySeparableError as exc:
        if point_table:
            logger.error("%s", exc)
        else:
            logger.warning("%s", exc)

    timing = {
        "load": loaded - started,
        "preprocess": preprocessed - loaded,
        "sweep": swept - preprocessed,
        "total": time.perf_counter() - started,
    }
    report = _build_report(args, settings, f, x.shape, mutation, cloud, grid, profiles, estimate, timing)

    write_sweep_table(profiles, out_dir / "sweep.csv")
    if point_table and estimate is not None:
        write_point_table(estimate.profile_used, out_dir / "point_probs.csv")
    if not args.no_svg:
        separability_curves_svg(profiles, out_dir / "separability_curves.svg")
        if estimate is not None:
            dimension_profile_svg(estimate, out_dir / "dimension_profile.svg")
            if point_table:
                histogram_svg(estimate.profile_used, out_dir / "p_alpha_histogram.svg")
    if point_table:
        (out_dir / "report.json").write_text(report.model_dump_json(indent=2))
    logger.info("artifacts written to %s", out_dir)

    _print_report(report, args.output_format)
    if point_table and estimate is None:
        return FullySeparableError.exit_code
    return 0


# ── synth ────────────────────────────────────────────────────


def _synthetic_spec(args: argparse.Namespace) -> SyntheticSpec:
    if args.config:
        return SyntheticSpec.model_validate_json(Path(args.config).read_text())
    if args.kind is None:
        raise UsageError("synth needs --kind or --config")
    n = args.n if args.n is not None else (1 if args.kind is ManifoldKind.curve else DEFAULT_INTRINSIC_DIM)
    return SyntheticSpec(
        kind=args.kind,
        intrinsic_dim=n,
        embed_dim=args.embed_dim if args.embed_dim is not None else minimal_embedding(args.kind, n),
        cardinality=args.cardinality,
        noise_sigma=args.sigma,
        seed=args.seed,
        cluster_count=args.clusters,
        cluster_radius=args.radius,
        cluster_fraction=args.fraction,
        rotation=args.rotate,
    )


def run_synth(args: argparse.Namespace, settings: Settings) -> int:
    spec = _synthetic_spec(args)
    path = Path(args.out) if args.out else _out_dir(args, settings) / f"{spec.label}.csv"
    save_matrix(generate(spec), path)
    sidecar = path.with_suffix(".spec.json")
    sidecar.write_text(spec.model_dump_json(indent=2))
    logger.info("wrote %s and %s", path, sidecar)
    if args.output_format == "json":
        print(json.dumps({"data": str(path), "spec": json.loads(spec.model_dump_json())}, indent=2))
    else:
        print(path)
    return 0


# ── benchmark ────────────────────────────────────────────────


def run_benchmark(args: argparse.Namespace, settings: Settings) -> int:
    battery = Battery.model_validate_json(Path(args.config).read_text()) if args.config else default_battery()
    out_dir = _out_dir(args, settings)
    report = run_battery(
        battery,
        block_size=args.block_size or settings.block_size,
        threads=args.threads or settings.threads,
        progress=sys.stderr.isatty(),
    )
    write_table(benchmark_table(report), out_dir / "benchmark.csv", columns=BENCHMARK_COLUMNS)
    (out_dir / "benchmark.json").write_text(report.model_dump_json(indent=2))

    if args.output_format == "json":
        print(report.model_dump_json(indent=2))
    else:
        for row in report.rows:
            print(f"{row.dataset:<14} n={row.intrinsic_dim:<3} FisherS={_fmt(row.fishers):>8} CD={_fmt(row.cd):>8}")
        for estimator, value in report.mean_pct_error.items():
            print(f"mean % error {estimator}: {value:.2f}")
    return 0


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f}"


COMMANDS = {
    "estimate": lambda args, settings: run_analysis(args, settings, point_table=True),
    "sweep": lambda args, settings: run_analysis(args, settings, point_table=False),
    "synth": run_synth,
    "benchmark": run_benchmark,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
        configure_logging(args.log_level or settings.log_level)
        return COMMANDS[args.command](args, settings)
    except ValidationError as exc:
        logger.error("invalid configuration: %s", exc)
        return UsageError.exit_code
    except FisherSepError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s", exc)
        return UsageError.exit_code

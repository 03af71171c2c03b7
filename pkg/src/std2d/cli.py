"""Command-line front end: run, sweep, figures, validate-config.

Exit codes: 0 success, 1 configuration error, 2 runtime error. The output
directory comes from --output-dir, the STD2D_OUTPUT_DIR environment
variable, or defaults to ./std2d_out. Every run and sweep writes its
effective config next to the results so numbers stay auditable.
"""

import argparse
import csv
import os
import sys
from pathlib import Path

from .config import ConfigError, dump_config, load_config, parse_file_size
from .figures import FIGURES, FigureDataError, emit_figures, load_results
from .messages import TRACE_COLUMNS
from .scenario import VARIANTS
from .simulate import run_scenario
from .sweep import SweepGrid, sweep, write_results, write_summary

OUTPUT_DIR_ENV = "STD2D_OUTPUT_DIR"


def _out_dir(args) -> Path:
    path = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "std2d_out"
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _scenario_overrides(args) -> dict:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.variant is not None:
        overrides["variant"] = args.variant
    if args.devices is not None:
        overrides["n_devices"] = args.devices
    if args.malicious_fraction is not None:
        overrides["adversary.malicious_fraction"] = args.malicious_fraction
    if args.file_size is not None:
        overrides["file_bits"] = parse_file_size(args.file_size)
    return overrides


def _add_common_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file (defaults apply when omitted)")
    parser.add_argument("--seed", type=int, help="override scenario seed")
    parser.add_argument("--variant", choices=VARIANTS, help="override delivery variant")
    parser.add_argument("--devices", type=int, help="override device count")
    parser.add_argument(
        "--malicious-fraction", type=float, help="override adversary.malicious_fraction"
    )
    parser.add_argument(
        "--file-size", help="override file size (bits, or e.g. 500kb / 10MB)"
    )
    parser.add_argument("--output-dir", help=f"output directory (or ${OUTPUT_DIR_ENV})")


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_seed_list(text: str) -> list[int]:
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


def cmd_run(args) -> int:
    config = load_config(args.config, _scenario_overrides(args))
    out = _out_dir(args)
    result = run_scenario(config)
    write_results([result.csv_row()], out / "results.csv")
    with open(out / "trace.csv", "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in result.trace.messages:
            writer.writerow(
                [record.time_tti, record.source, record.destination, record.variant, record.size_bits]
            )
    dump_config(config, out / "config_echo.yaml")
    print(f"run complete: variant={result.variant} seed={result.seed}")
    print(f"  wasted_capacity_pct={result.wasted_capacity_pct:.4g}")
    print(f"  mean_noncorrupted_kbits={result.mean_noncorrupted_kbits:.6g}")
    print(f"  download_energy_j={result.download_energy_j:.6g}")
    print(f"  results: {out / 'results.csv'}")
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config, _scenario_overrides(args))
    grid = SweepGrid(
        variants=args.variants.split(",") if args.variants else [config.variant],
        malicious_fractions=(
            _parse_float_list(args.malicious_grid)
            if args.malicious_grid
            else [config.adversary.malicious_fraction]
        ),
        file_bits=(
            [parse_file_size(s) for s in args.file_sizes.split(",")]
            if args.file_sizes
            else [config.file_bits]
        ),
        seeds=_parse_seed_list(args.seeds) if args.seeds else [config.seed],
    )
    for variant in grid.variants:
        if variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
    out = _out_dir(args)
    rows, errors = sweep(config, grid, parallelism=args.parallel)
    write_results(rows, out / "results.csv")
    write_summary(rows, out / "summary.csv")
    dump_config(config, out / "config_echo.yaml")
    print(f"sweep complete: {len(rows)} rows ({grid.size()} points) -> {out / 'results.csv'}")
    for error in errors:
        print(f"  point failed: {error}", file=sys.stderr)
    return 0 if not errors else 2


def cmd_figures(args) -> int:
    rows = load_results(args.results)
    figures = args.figures.split(",") if args.figures else None
    if figures:
        for figure in figures:
            if figure not in FIGURES:
                raise ConfigError(f"unknown figure {figure!r}; expected one of {sorted(FIGURES)}")
    out = Path(args.out_dir) if args.out_dir else _out_dir(args)
    produced = emit_figures(
        rows,
        out,
        figures=figures,
        render=not args.no_render,
        file_bits=parse_file_size(args.file_bits) if args.file_bits else None,
        malicious_pct=args.malicious_pct,
    )
    for path in produced:
        print(path)
    return 0


def cmd_validate_config(args) -> int:
    config = load_config(args.config, {})
    print(f"config ok: variant={config.variant} n_devices={config.n_devices} seed={config.seed}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="std2d",
        description="Secure trust-aware D2D multicast offloading simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one simulation run")
    _add_common_config_args(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="execute a parameter grid")
    _add_common_config_args(p_sweep)
    p_sweep.add_argument("--variants", help="comma-separated variants to sweep")
    p_sweep.add_argument("--malicious-grid", help="comma-separated malicious fractions")
    p_sweep.add_argument("--file-sizes", help="comma-separated file sizes (e.g. 5kb,500kb,10MB)")
    p_sweep.add_argument("--seeds", help="seed list, e.g. 1,2,3 or 1..10")
    p_sweep.add_argument("--parallel", type=int, default=1, help="worker processes")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_fig = sub.add_parser("figures", help="derive figure data files from sweep results")
    p_fig.add_argument("--results", required=True, help="sweep results.csv")
    p_fig.add_argument("--out-dir", help="where to write figure files")
    p_fig.add_argument("--output-dir", help=argparse.SUPPRESS)
    p_fig.add_argument("--figures", help=f"subset of {','.join(sorted(FIGURES))}")
    p_fig.add_argument("--file-bits", help="file size to slice malicious-% figures at")
    p_fig.add_argument(
        "--malicious-pct", type=float, help="malicious %% to slice file-size figures at"
    )
    p_fig.add_argument("--no-render", action="store_true", help="skip PNG rendering")
    p_fig.set_defaults(fn=cmd_figures)

    p_val = sub.add_parser("validate-config", help="check a config file and exit")
    p_val.add_argument("--config", required=True, help="YAML config file")
    p_val.set_defaults(fn=cmd_validate_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FigureDataError as exc:
        print(f"figure error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures map to exit code 2
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

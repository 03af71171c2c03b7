"""Parameter-grid execution with order-independent, reproducible output.

Grid points expand in a fixed order (variant, malicious fraction, file size,
seed) and each point runs as an independent single-seeded simulation, so a
sweep executed serially and one executed across worker processes produce
byte-identical result tables. Per-point failures are collected, not fatal.
"""

import csv
import dataclasses
import multiprocessing
import statistics
from dataclasses import dataclass, field

from .scenario import ScenarioConfig
from .simulate import RESULT_COLUMNS, run_scenario

SUMMARY_COLUMNS = (
    "variant",
    "malicious_pct",
    "file_bits",
    "n_seeds",
    "wasted_capacity_pct_mean",
    "wasted_capacity_pct_std",
    "mean_noncorrupted_kbits_mean",
    "mean_noncorrupted_kbits_std",
    "wasted_energy_frac_mean",
    "wasted_energy_frac_std",
    "relay_sec_pct_mean",
    "relay_sec_pct_std",
    "receiver_sec_pct_mean",
    "receiver_sec_pct_std",
    "download_energy_j_mean",
    "download_energy_j_std",
)

_METRICS = (
    "wasted_capacity_pct",
    "mean_noncorrupted_kbits",
    "wasted_energy_frac",
    "relay_sec_pct",
    "receiver_sec_pct",
    "download_energy_j",
)


@dataclass
class SweepGrid:
    variants: list[str] = field(default_factory=lambda: ["std2d"])
    malicious_fractions: list[float] = field(default_factory=lambda: [0.0])
    file_bits: list[int] = field(default_factory=lambda: [500_000])
    seeds: list[int] = field(default_factory=lambda: [1])

    def size(self) -> int:
        return (
            len(self.variants)
            * len(self.malicious_fractions)
            * len(self.file_bits)
            * len(self.seeds)
        )


def point_config(
    base: ScenarioConfig, variant: str, fraction: float, file_bits: int, seed: int
) -> ScenarioConfig:
    adversary = dataclasses.replace(base.adversary, malicious_fraction=fraction)
    return dataclasses.replace(
        base, variant=variant, file_bits=file_bits, seed=seed, adversary=adversary
    )


def grid_configs(base: ScenarioConfig, grid: SweepGrid) -> list[ScenarioConfig]:
    configs = []
    for variant in grid.variants:
        for fraction in grid.malicious_fractions:
            for bits in grid.file_bits:
                for seed in grid.seeds:
                    configs.append(point_config(base, variant, fraction, bits, seed))
    return configs


def run_point(config: ScenarioConfig):
    """One grid point; returns ("ok", row) or ("error", description)."""
    label = f"variant={config.variant} malicious={config.adversary.malicious_fraction} " \
            f"file_bits={config.file_bits} seed={config.seed}"
    try:
        result = run_scenario(config)
        return ("ok", result.csv_row())
    except Exception as exc:  # isolate point failures; the sweep reports them
        return ("error", f"{label}: {type(exc).__name__}: {exc}")


def sweep(
    base: ScenarioConfig, grid: SweepGrid, parallelism: int = 1
) -> tuple[list[dict], list[str]]:
    """Run every grid point; rows come back in grid order regardless of scheduling."""
    configs = grid_configs(base, grid)
    if parallelism <= 1:
        outcomes = [run_point(c) for c in configs]
    else:
        with multiprocessing.Pool(parallelism) as pool:
            outcomes = pool.map(run_point, configs, chunksize=1)
    rows = [payload for status, payload in outcomes if status == "ok"]
    errors = [payload for status, payload in outcomes if status == "error"]
    return rows, errors


def summarize(rows: list[dict]) -> list[dict]:
    """Per-point mean and standard deviation over seeds."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["variant"], row["malicious_pct"], row["file_bits"])
        groups.setdefault(key, []).append(row)
    summary = []
    for (variant, malicious_pct, file_bits), members in sorted(groups.items()):
        entry = {
            "variant": variant,
            "malicious_pct": malicious_pct,
            "file_bits": file_bits,
            "n_seeds": str(len(members)),
        }
        for metric in _METRICS:
            values = [float(m[metric]) for m in members]
            mean = statistics.fmean(values)
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            entry[f"{metric}_mean"] = f"{mean:.10g}"
            entry[f"{metric}_std"] = f"{std:.10g}"
        summary.append(entry)
    return summary


def write_rows(rows: list[dict], columns, path) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_results(rows: list[dict], path) -> None:
    write_rows(rows, RESULT_COLUMNS, path)


def write_summary(rows: list[dict], path) -> None:
    write_rows(summarize(rows), SUMMARY_COLUMNS, path)

"""Plot-ready data files derived from sweep results, with PNG rendering.

Every figure is recomputed from the results CSV alone; nothing re-touches
simulation state. Each figure gets a plain-text .dat file (space-separated
columns, commented header) and, unless rendering is disabled, a .png drawn
from exactly those columns.
"""

import csv
import statistics
from pathlib import Path

D2D_VARIANTS = ("d2d", "sd2d", "std2d")

FIGURES = {
    "fig2": {
        "file": "fig2_wasted_capacity",
        "title": "Wasted sidelink capacity vs malicious devices",
        "xlabel": "malicious devices (%)",
        "ylabel": "wasted capacity (%)",
    },
    "fig3": {
        "file": "fig3_noncorrupted_kbits",
        "title": "Clean data received vs malicious devices",
        "xlabel": "malicious devices (%)",
        "ylabel": "mean non-corrupted kbits",
    },
    "fig4": {
        "file": "fig4_wasted_energy",
        "title": "Wasted receiver energy vs malicious devices",
        "xlabel": "malicious devices (%)",
        "ylabel": "wasted energy fraction",
    },
    "fig5": {
        "file": "fig5_security_energy",
        "title": "Security share of device energy vs file size",
        "xlabel": "file size (bits)",
        "ylabel": "security energy (%)",
    },
    "fig6": {
        "file": "fig6_download_energy",
        "title": "Energy to download vs file size",
        "xlabel": "file size (bits)",
        "ylabel": "mean download energy (J)",
    },
}

_BY_FRACTION = ("fig2", "fig3", "fig4")
_METRIC_OF = {
    "fig2": "wasted_capacity_pct",
    "fig3": "mean_noncorrupted_kbits",
    "fig4": "wasted_energy_frac",
}


class FigureDataError(Exception):
    """The results table does not cover the requested figure's axes."""

    def __init__(self, message: str, missing: list | None = None):
        super().__init__(message)
        self.missing = missing or []


def load_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise FigureDataError(f"no result rows in {path}")
    for row in rows:
        row["malicious_pct"] = float(row["malicious_pct"])
        row["file_bits"] = int(row["file_bits"])
        for key in (
            "wasted_capacity_pct",
            "mean_noncorrupted_kbits",
            "wasted_energy_frac",
            "relay_sec_pct",
            "receiver_sec_pct",
            "download_energy_j",
        ):
            row[key] = float(row[key])
    return rows


def _single_value(values: set, what: str, flag: str):
    if len(values) > 1:
        raise FigureDataError(
            f"results contain several {what} values {sorted(values)}; pass {flag} to pick one"
        )
    return next(iter(values))


def _cell_mean(rows: list[dict], metric: str) -> float:
    return statistics.fmean(row[metric] for row in rows)


def figure_table(
    rows: list[dict],
    figure: str,
    file_bits: int | None = None,
    malicious_pct: float | None = None,
) -> tuple[list[str], list[list[float]]]:
    """Column names plus data rows for one figure, averaging over seeds."""
    if figure not in FIGURES:
        raise FigureDataError(f"unknown figure {figure!r}; expected one of {sorted(FIGURES)}")

    if figure in _BY_FRACTION:
        pool = [r for r in rows if r["variant"] in D2D_VARIANTS]
        if not pool:
            raise FigureDataError(
                f"{figure}: no rows for variants {D2D_VARIANTS}",
                missing=[(v, "*") for v in D2D_VARIANTS],
            )
        if file_bits is None:
            file_bits = _single_value({r["file_bits"] for r in pool}, "file_bits", "--file-bits")
        pool = [r for r in pool if r["file_bits"] == file_bits]
        fractions = sorted({r["malicious_pct"] for r in pool})
        missing = []
        for variant in D2D_VARIANTS:
            for fraction in fractions:
                if not any(
                    r["variant"] == variant and r["malicious_pct"] == fraction for r in pool
                ):
                    missing.append((variant, fraction))
        if missing:
            raise FigureDataError(
                f"{figure}: missing grid cells (variant, malicious_pct): {missing}", missing
            )
        metric = _METRIC_OF[figure]
        data = []
        for fraction in fractions:
            line = [fraction]
            for variant in D2D_VARIANTS:
                cell = [
                    r for r in pool if r["variant"] == variant and r["malicious_pct"] == fraction
                ]
                line.append(_cell_mean(cell, metric))
            data.append(line)
        return ["malicious_pct", *D2D_VARIANTS], data

    required = ("std2d",) if figure == "fig5" else ("std2d", "unicast")
    pool = [r for r in rows if r["variant"] in required]
    if not pool:
        raise FigureDataError(
            f"{figure}: no rows for variants {required}", missing=[(v, "*") for v in required]
        )
    if malicious_pct is None:
        malicious_pct = _single_value(
            {r["malicious_pct"] for r in pool}, "malicious_pct", "--malicious-pct"
        )
    pool = [r for r in pool if r["malicious_pct"] == malicious_pct]
    sizes = sorted({r["file_bits"] for r in pool})
    missing = []
    for variant in required:
        for size in sizes:
            if not any(r["variant"] == variant and r["file_bits"] == size for r in pool):
                missing.append((variant, size))
    if missing:
        raise FigureDataError(
            f"{figure}: missing grid cells (variant, file_bits): {missing}", missing
        )
    data = []
    if figure == "fig5":
        for size in sizes:
            cell = [r for r in pool if r["file_bits"] == size]
            data.append(
                [size, _cell_mean(cell, "relay_sec_pct"), _cell_mean(cell, "receiver_sec_pct")]
            )
        return ["file_bits", "relay_pct", "receiver_pct"], data
    for size in sizes:
        std2d_cell = [r for r in pool if r["variant"] == "std2d" and r["file_bits"] == size]
        unicast_cell = [r for r in pool if r["variant"] == "unicast" and r["file_bits"] == size]
        data.append(
            [
                size,
                _cell_mean(std2d_cell, "download_energy_j"),
                _cell_mean(unicast_cell, "download_energy_j"),
            ]
        )
    return ["file_bits", "std2d_j", "unicast_j"], data


def write_figure_data(columns: list[str], data: list[list[float]], figure: str, path) -> None:
    meta = FIGURES[figure]
    lines = [f"# {meta['title']}", f"# columns: {' '.join(columns)}"]
    for row in data:
        lines.append(" ".join(f"{v:.10g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def render_figure_png(columns: list[str], data: list[list[float]], figure: str, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    meta = FIGURES[figure]
    xs = [row[0] for row in data]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for idx, name in enumerate(columns[1:], start=1):
        ax.plot(xs, [row[idx] for row in data], marker="o", label=name)
    if figure in ("fig5", "fig6"):
        ax.set_xscale("log")
    ax.set_title(meta["title"])
    ax.set_xlabel(meta["xlabel"])
    ax.set_ylabel(meta["ylabel"])
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_figures(
    rows: list[dict],
    out_dir,
    figures=None,
    render: bool = True,
    file_bits: int | None = None,
    malicious_pct: float | None = None,
) -> list[Path]:
    """Write .dat (and optionally .png) files for the requested figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    produced = []
    for figure in figures or sorted(FIGURES):
        columns, data = figure_table(
            rows, figure, file_bits=file_bits, malicious_pct=malicious_pct
        )
        dat_path = out_dir / f"{FIGURES[figure]['file']}.dat"
        write_figure_data(columns, data, figure, dat_path)
        produced.append(dat_path)
        if render:
            png_path = out_dir / f"{FIGURES[figure]['file']}.png"
            render_figure_png(columns, data, figure, png_path)
            produced.append(png_path)
    return produced

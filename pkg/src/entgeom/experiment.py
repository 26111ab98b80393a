"""Concurrence-versus-E experiment on random products of two 2-qubit states."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import spearmanr

from .entropy import SubsystemEntropyCache
from .geometry import e_normalization, entanglement_content_E
from .oracles import concurrence
from .states import bell, ginibre_matrix, rng_for, sample_seed
from .tensor import MultipartiteState, compose, validate_density

CSV_HEADER = ("sample_id", "seed", "concurrence_sum", "e_raw", "e_normalized")
INJECTED_SEED = -1


def fmt(x: float) -> str:
    """12 significant digits, fixed scientific layout."""
    return f"{x:.11e}"


@dataclass(frozen=True)
class Fig2Row:
    sample_id: int
    seed: int
    concurrence_sum: float
    e_raw: float
    e_normalized: float

    def cells(self) -> list[str]:
        return [str(self.sample_id), str(self.seed), fmt(self.concurrence_sum), fmt(self.e_raw), fmt(self.e_normalized)]


@dataclass
class ExperimentConfig:
    samples: int = 1000
    seed: int = 0
    rank: int = 4
    csv_path: Path | None = None
    plot_path: Path | None = None
    inject_bell: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if not 1 <= self.rank <= 4:
            raise ValueError(f"rank must lie in 1..4, got {self.rank}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def evaluate_pair(sample_id: int, seed: int, rho12: MultipartiteState, rho34: MultipartiteState) -> Fig2Row:
    c = concurrence(rho12) + concurrence(rho34)
    e_raw = entanglement_content_E(SubsystemEntropyCache(compose(rho12, rho34)))
    return Fig2Row(sample_id, seed, c, e_raw, e_raw / e_normalization())


def draw_sample(sample_id: int, seed: int, rank: int) -> Fig2Row:
    s = sample_seed(seed, sample_id)
    rng = rng_for(s)
    rho12 = validate_density(ginibre_matrix(rng, 4, rank), (2, 2))
    rho34 = validate_density(ginibre_matrix(rng, 4, rank), (2, 2))
    return evaluate_pair(sample_id, s, rho12, rho34)


def sort_rows(rows: Iterable[Fig2Row]) -> list[Fig2Row]:
    """Ascending concurrence sum, ties broken by sample id."""
    return sorted(rows, key=lambda r: (r.concurrence_sum, r.sample_id))


def spearman(rows: Sequence[Fig2Row]) -> float:
    if len(rows) < 2:
        return math.nan
    x = [r.concurrence_sum for r in rows]
    y = [r.e_normalized for r in rows]
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return math.nan
    return float(spearmanr(x, y).statistic)


def summarize(rows: Sequence[Fig2Row], config: ExperimentConfig) -> dict:
    return {
        "samples": config.samples,
        "seed": config.seed,
        "rank": config.rank,
        "rows": len(rows),
        "injected": sum(r.seed == INJECTED_SEED for r in rows),
        "normalization": e_normalization(),
        "spearman": spearman(rows),
        "mean_concurrence_sum": float(np.mean([r.concurrence_sum for r in rows])),
        "mean_e_normalized": float(np.mean([r.e_normalized for r in rows])),
    }


def run_fig2(config: ExperimentConfig) -> tuple[list[Fig2Row], dict]:
    """Draw, evaluate and sort the samples; write the CSV and plot data when paths are set.

    Sample ``i`` draws its two states from the generator seeded with
    ``seed ^ i``. With ``inject_bell`` a Bell x Bell row is appended with
    ``sample_id = samples`` and seed -1.
    """
    ids = range(config.samples)
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            rows = list(pool.map(lambda i: draw_sample(i, config.seed, config.rank), ids))
    else:
        rows = [draw_sample(i, config.seed, config.rank) for i in ids]
    if config.inject_bell:
        rows.append(evaluate_pair(config.samples, INJECTED_SEED, bell(), bell()))
    rows = sort_rows(rows)
    summary = summarize(rows, config)
    if config.csv_path is not None:
        write_csv(rows, config.csv_path)
    if config.plot_path is not None:
        write_plot_data(rows, config.plot_path, summary)
    return rows, summary


def csv_text(rows: Iterable[Fig2Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def write_csv(rows: Iterable[Fig2Row], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(csv_text(rows))


def read_csv(path: str | Path) -> list[Fig2Row]:
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        return [
            Fig2Row(int(a), int(b), float(c), float(d), float(e))
            for a, b, c, d, e in reader
        ]


def write_plot_data(rows: Sequence[Fig2Row], path: str | Path, summary: dict | None = None) -> None:
    """Whitespace columns ``rank concurrence_sum e_normalized`` with gnuplot comments."""
    lines = [
        "# concurrence sum and normalized E, rows sorted by concurrence sum",
        f"# gnuplot: plot '{Path(path).name}' using 1:2 with lines title 'C12+C34', '' using 1:3 with points title 'E'",
    ]
    if summary is not None:
        lines.append(f"# spearman {summary['spearman']:.12g}")
    lines.append("# rank concurrence_sum e_normalized")
    lines += [f"{i} {fmt(r.concurrence_sum)} {fmt(r.e_normalized)}" for i, r in enumerate(rows)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

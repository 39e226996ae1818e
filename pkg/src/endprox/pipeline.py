"""Dataset pipeline: per-record statistics, summaries, heatmap grids, and
comparisons of empirical histograms against the limit laws."""

from __future__ import annotations

import csv
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import IO, Mapping, Optional, Sequence

from .exact import Model, PfoldParams, Stat
from .limits import LenDist, LimitDist, NegBinomial, limit_of, moments
from .structure import (
    DEFAULT_ETE,
    EteModel,
    ExteriorStats,
    ParsedRecord,
    ete_distance,
    exterior_stats,
    shortest_path_stats,
)


class NoRecords(ValueError):
    """The input produced no usable records."""


class EmptyHistogram(ValueError):
    """A histogram with no mass cannot be compared."""


@dataclass(frozen=True)
class StatsRow:
    id: str
    length: int
    deg: int
    unp: int
    chn: int
    len_ext: int
    ete_nm: float
    rms_nm: float
    hel: Optional[int]
    stm: Optional[int]
    stem_helices: Optional[int]
    pseudoknotted: bool
    group: str


@dataclass(frozen=True)
class SummaryBlock:
    group: str
    n_structures: int
    means: dict[str, float]
    variances: dict[str, float]


ROW_FIELDS = [
    "id",
    "length",
    "deg",
    "unp",
    "chn",
    "len_ext",
    "ete_nm",
    "rms_nm",
    "hel",
    "stm",
    "stem_helices",
    "pseudoknotted",
    "group",
]

_SUMMARY_STATS = ["deg", "unp", "chn", "len_ext", "ete_nm", "rms_nm", "hel", "stm", "stem_helices"]


def _row_from_record(rec: ParsedRecord, m: EteModel) -> StatsRow:
    s = rec.structure
    assert s is not None
    ex: ExteriorStats = shortest_path_stats(s, m) if s.crossing else exterior_stats(s, m)
    return StatsRow(
        id=rec.id,
        length=s.length,
        deg=ex.deg,
        unp=ex.unp,
        chn=ex.chn,
        len_ext=ex.len_ext,
        ete_nm=ex.ete_nm,
        rms_nm=ex.rms_nm,
        hel=ex.hel,
        stm=ex.stm,
        stem_helices=ex.stem_helices,
        pseudoknotted=s.crossing,
        group=rec.group or "default",
    )


def run_stats(
    records: Sequence[ParsedRecord], m: EteModel = DEFAULT_ETE, jobs: int = 1
) -> tuple[list[StatsRow], list[SummaryBlock], list[tuple[str, str]]]:
    """Rows in input order, per-group summaries, and (id, message) parse
    failures.  Nested records go through the exterior walk; crossing records
    through the shortest path.  Raises NoRecords when nothing parses."""
    if not records:
        raise NoRecords("no records in input")
    good = [rec for rec in records if rec.structure is not None]
    errors = [(rec.id, rec.error or "parse error") for rec in records if rec.structure is None]
    if not good:
        raise NoRecords("every record failed to parse")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda rec: _row_from_record(rec, m), good))
    else:
        rows = [_row_from_record(rec, m) for rec in good]
    return rows, summarize(rows), errors


def summarize(rows: Sequence[StatsRow]) -> list[SummaryBlock]:
    """Population mean/variance per group; optional statistics average over
    the rows where they are present."""
    by_group: dict[str, list[StatsRow]] = {}
    for row in rows:
        by_group.setdefault(row.group, []).append(row)
    blocks = []
    for group, members in by_group.items():
        means: dict[str, float] = {}
        variances: dict[str, float] = {}
        for name in _SUMMARY_STATS:
            values = [getattr(r, name) for r in members if getattr(r, name) is not None]
            if not values:
                continue
            mu = sum(values) / len(values)
            means[name] = mu
            variances[name] = sum((v - mu) ** 2 for v in values) / len(values)
        blocks.append(SummaryBlock(group, len(members), means, variances))
    return blocks


# ---------------------------------------------------------------------------
# heatmap

ETE_BAND_EDGES = [1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5]


def ete_band(x: float) -> str:
    """Heatmap color-band label for a distance value; values outside the six
    1-nm bands map to "other"."""
    for lo, hi in zip(ETE_BAND_EDGES, ETE_BAND_EDGES[1:]):
        if lo <= x < hi:
            return f"{lo:g}-{hi:g}"
    return "other"


@dataclass(frozen=True)
class HeatmapCell:
    deg: int
    unp: int
    percent: float
    band: str


def heatmap(rows: Sequence[StatsRow], m: EteModel = DEFAULT_ETE) -> list[HeatmapCell]:
    """Percentage of structures per (deg, unp) cell, with the distance band
    of the cell's coordinates."""
    if not rows:
        raise NoRecords("heatmap needs at least one row")
    counts = Counter((row.deg, row.unp) for row in rows)
    total = len(rows)
    cells = []
    for (deg, unp), cnt in sorted(counts.items()):
        dist = ete_distance(deg, max(0, deg + unp - 1), m)
        cells.append(HeatmapCell(deg, unp, 100.0 * cnt / total, ete_band(dist)))
    return cells


# ---------------------------------------------------------------------------
# comparison against limit laws


def law_quantile_cap(d: LimitDist, tail: float = 1e-6) -> int:
    """Smallest k whose cdf reaches 1 - tail."""
    if not isinstance(d, (NegBinomial, LenDist)):
        raise EmptyHistogram("quantile cap is defined for scalar laws")
    acc = 0.0
    for k in range(100_000):
        acc += float(d.pmf(k))
        if acc >= 1 - tail:
            return k
    raise ValueError("law cdf does not reach the requested quantile")


def total_variation(h: Mapping[int, float], d: LimitDist, cap: int) -> float:
    """Half L1 distance between the normalized histogram and the law's pmf on
    0..cap, plus half the difference of the two tail masses beyond cap."""
    if not h:
        raise EmptyHistogram("empty histogram")
    total = float(sum(h.values()))
    if total <= 0 or any(v < 0 for v in h.values()):
        raise EmptyHistogram("histogram must have nonnegative mass")
    body = 0.0
    law_body = 0.0
    for k in range(cap + 1):
        pk = float(d.pmf(k))
        law_body += pk
        body += abs(h.get(k, 0.0) / total - pk)
    emp_tail = sum(v for k, v in h.items() if k > cap) / total
    law_tail = max(0.0, 1.0 - law_body)
    return 0.5 * body + 0.5 * abs(emp_tail - law_tail)


_STAT_ATTR = {
    Stat.DEG: "deg",
    Stat.UNP: "unp",
    Stat.CHN: "chn",
    Stat.LEN: "len_ext",
    Stat.HEL: "hel",
    Stat.STM: "stm",
    Stat.STEM_HELICES: "stem_helices",
}


@dataclass(frozen=True)
class CompareReport:
    model: str
    stat: str
    n_values: int
    n_skipped: int
    empirical_mean: float
    empirical_variance: float
    law_mean: float
    law_variance: float
    tv: float
    bins: list[tuple[int, float, float]]  # value, empirical prob, law pmf


def compare(
    rows: Sequence[StatsRow],
    model: Model,
    stat: Stat,
    p: Optional[PfoldParams] = None,
) -> CompareReport:
    """Empirical distribution of one statistic against its limit law.

    Rows lacking the statistic (e.g. unpaired structures for hel) are
    skipped and counted."""
    attr = _STAT_ATTR.get(stat)
    if attr is None:
        from .exact import UnsupportedCombination

        raise UnsupportedCombination(f"compare does not support {stat.value}")
    law = limit_of(model, stat, p)
    values = [getattr(row, attr) for row in rows]
    kept = [v for v in values if v is not None]
    if not kept:
        raise EmptyHistogram("no rows carry this statistic")
    hist = Counter(kept)
    cap = law_quantile_cap(law)
    mu = sum(kept) / len(kept)
    var = sum((v - mu) ** 2 for v in kept) / len(kept)
    summary = moments(law)
    tv = total_variation(hist, law, cap)
    bins = [
        (k, hist.get(k, 0) / len(kept), float(law.pmf(k)))
        for k in range(0, min(cap, max(hist) if hist else 0) + 1)
    ]
    return CompareReport(
        model=model.value,
        stat=stat.value,
        n_values=len(kept),
        n_skipped=len(values) - len(kept),
        empirical_mean=mu,
        empirical_variance=var,
        law_mean=float(summary.mean),
        law_variance=float(summary.variance),
        tv=tv,
        bins=bins,
    )


# ---------------------------------------------------------------------------
# serialization


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def write_rows_csv(rows: Sequence[StatsRow], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ROW_FIELDS)
    for row in rows:
        writer.writerow([_csv_cell(getattr(row, f)) for f in ROW_FIELDS])


def rows_to_json(rows: Sequence[StatsRow]) -> list[dict]:
    return [asdict(row) for row in rows]


def write_summary_csv(blocks: Sequence[SummaryBlock], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["group", "n_structures", "stat", "mean", "variance"])
    for block in blocks:
        for name in _SUMMARY_STATS:
            if name in block.means:
                writer.writerow(
                    [block.group, block.n_structures, name, block.means[name], block.variances[name]]
                )


def summary_to_json(blocks: Sequence[SummaryBlock]) -> list[dict]:
    return [asdict(block) for block in blocks]


def write_heatmap_csv(cells: Sequence[HeatmapCell], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["deg", "unp", "percent", "ete_band"])
    for cell in cells:
        writer.writerow([cell.deg, cell.unp, cell.percent, cell.band])


def write_compare_csv(report: CompareReport, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        [
            "model",
            "stat",
            "n_values",
            "n_skipped",
            "empirical_mean",
            "empirical_variance",
            "law_mean",
            "law_variance",
            "tv",
        ]
    )
    writer.writerow(
        [
            report.model,
            report.stat,
            report.n_values,
            report.n_skipped,
            report.empirical_mean,
            report.empirical_variance,
            report.law_mean,
            report.law_variance,
            report.tv,
        ]
    )
    writer.writerow([])
    writer.writerow(["value", "empirical_prob", "law_pmf"])
    for k, emp, pk in report.bins:
        writer.writerow([k, emp, pk])

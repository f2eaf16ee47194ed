"""Hot-day exposure from daily maximum temperature series.

A hot day is a calendar day whose maximum temperature strictly exceeds
the threshold (35 C by default). Counts are period totals over an
inclusive year window; deltas are future minus baseline totals per node
and climate model; ensemble statistics summarize per-node values across
the model ensemble.

Series arrive either per node (``model,node_id,date,tmax_c``) or on a
regular lat/lon grid (``model,lat,lon,date,tmax_c``) plus a mapping step
that assigns each node its nearest grid cell center by great-circle
distance. Calendars are taken at face value: no leap-day normalization,
and models with shortened calendars are compared via period totals.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .centrality import RankedNodes
from .errors import DataError
from .network import NodeRecord

DEFAULT_THRESHOLD_C = 35.0

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class PeriodSpec:
    """An inclusive year window, e.g. the 1991-2020 baseline."""

    label: str
    start_year: int
    end_year: int

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise ValueError(f"period {self.label!r}: start_year > end_year")

    def n_days(self) -> int:
        return (date(self.end_year + 1, 1, 1) - date(self.start_year, 1, 1)).days

    def contains(self, day: date) -> bool:
        return self.start_year <= day.year <= self.end_year


BASELINE = PeriodSpec("1991-2020", 1991, 2020)
FUTURE_NEAR = PeriodSpec("2021-2050", 2021, 2050)
FUTURE_FAR = PeriodSpec("2051-2080", 2051, 2080)


@dataclass(frozen=True)
class DailyTmaxSeries:
    """Daily maximum temperature at one node for one climate model."""

    model: str
    node_id: int
    dates: tuple[date, ...]
    tmax: tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.tmax):
            raise ValueError("dates and tmax must have equal length")
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise ValueError(f"dates not strictly increasing at index {i}")
        for value in self.tmax:
            if not math.isfinite(value):
                raise ValueError("tmax values must be finite")


@dataclass(frozen=True)
class HotDayProfile:
    """Total hot days per node for one model and period."""

    model: str
    period: PeriodSpec
    counts: Mapping[int, int]
    threshold_c: float = DEFAULT_THRESHOLD_C

    def __post_init__(self):
        limit = self.period.n_days()
        for node, count in self.counts.items():
            if not 0 <= count <= limit:
                raise ValueError(
                    f"node {node}: {count} hot days outside [0, {limit}] for {self.period.label}"
                )


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    min: float
    max: float

    def __post_init__(self):
        if not (self.min <= self.mean <= self.max) or self.sd < 0:
            raise ValueError("requires min <= mean <= max and sd >= 0")


@dataclass(frozen=True)
class EnsembleSummary:
    """Mean/sd/min/max across climate models, keyed per node or per step.

    ``sd`` is the sample standard deviation; with a single model it is
    reported as 0 and ``single_model`` flags the degenerate case.
    """

    target: str
    stats: Mapping[object, SummaryStats]
    n_models: int

    @property
    def single_model(self) -> bool:
        return self.n_models == 1


def count_hot_days(
    series: DailyTmaxSeries, period: PeriodSpec, threshold_c: float = DEFAULT_THRESHOLD_C
) -> int:
    """Days in the period with tmax strictly above the threshold.

    A day at exactly the threshold does not count. An empty overlap
    between series and period is legal and returns 0.
    """
    if not math.isfinite(threshold_c):
        raise ValueError("threshold must be finite")
    count = 0
    for day, value in zip(series.dates, series.tmax):
        if period.contains(day) and value > threshold_c:
            count += 1
    return count


def build_hot_day_profile(
    series_by_node: Mapping[int, DailyTmaxSeries],
    period: PeriodSpec,
    threshold_c: float = DEFAULT_THRESHOLD_C,
) -> HotDayProfile:
    """Profile for one model from its per-node series (all same model)."""
    models = {s.model for s in series_by_node.values()}
    if len(models) != 1:
        raise ValueError(f"series must share one model, got {sorted(models)}")
    counts = {
        node: count_hot_days(s, period, threshold_c) for node, s in series_by_node.items()
    }
    return HotDayProfile(models.pop(), period, counts, threshold_c)


def hot_day_delta(future: HotDayProfile, baseline: HotDayProfile) -> dict[int, int]:
    """Per-node change in hot days, future minus baseline (may be negative)."""
    if future.model != baseline.model:
        raise ValueError(f"model mismatch: {future.model!r} vs {baseline.model!r}")
    if future.threshold_c != baseline.threshold_c:
        raise ValueError(
            f"threshold mismatch: {future.threshold_c} vs {baseline.threshold_c}"
        )
    if set(future.counts) != set(baseline.counts):
        raise ValueError("node sets differ between future and baseline profiles")
    return {node: future.counts[node] - baseline.counts[node] for node in sorted(future.counts)}


def summarize(values: Sequence[float]) -> SummaryStats:
    """Mean, sample sd, min, max of a non-empty value list."""
    k = len(values)
    lo, hi = min(values), max(values)
    mean = math.fsum(values) / k
    # exact summation keeps the mean inside [lo, hi] up to one final
    # rounding; clamp so the bracketing invariant holds bit-exactly
    mean = min(max(mean, lo), hi)
    if k > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
        sd = math.sqrt(var)
    else:
        sd = 0.0
    return SummaryStats(mean=mean, sd=sd, min=lo, max=hi)


def ensemble_stats(
    per_model: Mapping[str, Mapping[int, float]], target: str = "delta_hot_days"
) -> EnsembleSummary:
    """Per-node mean/sd/min/max across models.

    All models must cover the same node set. One model is legal: sd is 0
    and the summary is flagged via ``single_model``.
    """
    if not per_model:
        raise ValueError("need at least one model")
    models = sorted(per_model)
    node_set = set(per_model[models[0]])
    for m in models[1:]:
        if set(per_model[m]) != node_set:
            raise ValueError(f"model {m!r} covers a different node set")
    stats = {
        node: summarize([float(per_model[m][node]) for m in models]) for node in sorted(node_set)
    }
    return EnsembleSummary(target=target, stats=stats, n_models=len(models))


def top_k_frequency(rankings: Sequence[RankedNodes], k: int) -> dict[int, int]:
    """How many models place each node in their top-k.

    Every ranking must cover the same node universe; values range from 0
    (absent everywhere) to the number of models.
    """
    if not rankings:
        raise ValueError("need at least one ranking")
    universe = set(rankings[0].node_ids)
    for r in rankings[1:]:
        if set(r.node_ids) != universe:
            raise ValueError("rankings cover inconsistent node universes")
    for r in rankings:
        if k > len(r.entries):
            raise ValueError(f"k={k} exceeds ranking length {len(r.entries)}")
    freq = {node: 0 for node in sorted(universe)}
    for r in rankings:
        for node in r.node_ids[:k]:
            freq[node] += 1
    return freq


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in km."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


@dataclass(frozen=True)
class RegularGrid:
    """Cell centers of a regular lat/lon grid, each axis sorted ascending."""

    lats: tuple[float, ...]
    lons: tuple[float, ...]

    def __post_init__(self):
        for axis in (self.lats, self.lons):
            if not axis:
                raise ValueError("grid axes must be non-empty")
            if list(axis) != sorted(set(axis)):
                raise ValueError("grid axis values must be strictly ascending")

    def _half_step(self, axis: tuple[float, ...]) -> float:
        return (axis[1] - axis[0]) / 2 if len(axis) > 1 else 0.0

    def covers(self, lat: float, lon: float) -> bool:
        dlat = self._half_step(self.lats)
        dlon = self._half_step(self.lons)
        return (
            self.lats[0] - dlat <= lat <= self.lats[-1] + dlat
            and self.lons[0] - dlon <= lon <= self.lons[-1] + dlon
        )


def map_nodes_to_grid(
    nodes: Iterable[NodeRecord], grid: RegularGrid
) -> dict[int, tuple[float, float]]:
    """Assign each node its nearest cell center by great-circle distance.

    Exact ties break toward the lower (lat, lon) cell. Raises ValueError
    for nodes outside the grid bounding box (cell footprints).
    """
    out: dict[int, tuple[float, float]] = {}
    for node in nodes:
        if not grid.covers(node.lat, node.lon):
            raise ValueError(
                f"node {node.id} at ({node.lat}, {node.lon}) outside grid bounding box"
            )
        best = None
        best_d = math.inf
        for lat in grid.lats:
            for lon in grid.lons:
                d = haversine_km(node.lat, node.lon, lat, lon)
                if d < best_d:  # strict: first (lowest lat, lon) wins ties
                    best_d = d
                    best = (lat, lon)
        out[node.id] = best
    return out


# ---------------------------------------------------------------------------
# CSV interfaces


def read_series_csv(paths: Iterable) -> dict[tuple[str, int], DailyTmaxSeries]:
    """Read per-node daily series files (``model,node_id,date,tmax_c``).

    Rows may arrive in any order; they are sorted by date per series.
    """
    buckets: dict[tuple[str, int], list[tuple[date, float]]] = {}
    for path in paths:
        p = Path(path)
        if not p.is_file():
            raise DataError("file not found", path=p)
        with p.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["model", "node_id", "date", "tmax_c"]:
                raise DataError(f"unexpected header {header}", path=p, line=1)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    key = (row[0], int(row[1]))
                    day = date.fromisoformat(row[2])
                    value = float(row[3])
                except (ValueError, IndexError) as exc:
                    raise DataError(str(exc), path=p, line=lineno) from exc
                buckets.setdefault(key, []).append((day, value))
    out = {}
    for (model, node_id), rows in buckets.items():
        rows.sort(key=lambda r: r[0])
        try:
            out[(model, node_id)] = DailyTmaxSeries(
                model, node_id, tuple(r[0] for r in rows), tuple(r[1] for r in rows)
            )
        except ValueError as exc:
            raise DataError(f"series ({model}, {node_id}): {exc}") from exc
    return out


def read_gridded_series_csv(
    paths: Iterable,
) -> tuple[RegularGrid, dict[tuple[str, float, float], list[tuple[date, float]]]]:
    """Read grid-form series (``model,lat,lon,date,tmax_c``)."""
    cells: dict[tuple[str, float, float], list[tuple[date, float]]] = {}
    lats: set[float] = set()
    lons: set[float] = set()
    for path in paths:
        p = Path(path)
        if not p.is_file():
            raise DataError("file not found", path=p)
        with p.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["model", "lat", "lon", "date", "tmax_c"]:
                raise DataError(f"unexpected header {header}", path=p, line=1)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    lat, lon = float(row[1]), float(row[2])
                    key = (row[0], lat, lon)
                    day = date.fromisoformat(row[3])
                    value = float(row[4])
                except (ValueError, IndexError) as exc:
                    raise DataError(str(exc), path=p, line=lineno) from exc
                lats.add(lat)
                lons.add(lon)
                cells.setdefault(key, []).append((day, value))
    for rows in cells.values():
        rows.sort(key=lambda r: r[0])
    return RegularGrid(tuple(sorted(lats)), tuple(sorted(lons))), cells


def node_series_from_grid(
    nodes: Sequence[NodeRecord],
    grid: RegularGrid,
    cells: Mapping[tuple[str, float, float], list[tuple[date, float]]],
) -> dict[tuple[str, int], DailyTmaxSeries]:
    """Join grid-form series onto nodes via nearest-cell assignment."""
    mapping = map_nodes_to_grid(nodes, grid)
    models = sorted({model for model, _, _ in cells})
    out = {}
    for node in nodes:
        lat, lon = mapping[node.id]
        for model in models:
            rows = cells.get((model, lat, lon))
            if rows is None:
                raise DataError(f"no series for model {model!r} at grid cell ({lat}, {lon})")
            out[(model, node.id)] = DailyTmaxSeries(
                model, node.id, tuple(r[0] for r in rows), tuple(r[1] for r in rows)
            )
    return out


def write_profiles_csv(profiles: Sequence[HotDayProfile], path) -> None:
    """Export hot-day profiles (``model,period_label,node_id,hot_days,threshold_c``)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "period_label", "node_id", "hot_days", "threshold_c"])
        for profile in profiles:
            for node in sorted(profile.counts):
                writer.writerow(
                    [
                        profile.model,
                        profile.period.label,
                        node,
                        profile.counts[node],
                        repr(profile.threshold_c),
                    ]
                )


def read_profiles_csv(path, periods: Mapping[str, PeriodSpec]) -> list[HotDayProfile]:
    """Read precomputed profiles; ``periods`` maps labels to year windows."""
    p = Path(path)
    if not p.is_file():
        raise DataError("file not found", path=p)
    grouped: dict[tuple[str, str, float], dict[int, int]] = {}
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["model", "period_label", "node_id", "hot_days", "threshold_c"]:
            raise DataError(f"unexpected header {header}", path=p, line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                model, label = row[0], row[1]
                node = int(row[2])
                count = int(row[3])
                threshold = float(row[4])
            except (ValueError, IndexError) as exc:
                raise DataError(str(exc), path=p, line=lineno) from exc
            if label not in periods:
                raise DataError(f"unknown period label {label!r}", path=p, line=lineno)
            grouped.setdefault((model, label, threshold), {})[node] = count
    return [
        HotDayProfile(model, periods[label], counts, threshold)
        for (model, label, threshold), counts in sorted(grouped.items())
    ]


def write_delta_csv(deltas: Mapping[str, Mapping[int, int]], path) -> None:
    """Export per-model deltas (``model,node_id,delta_hot_days``)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "node_id", "delta_hot_days"])
        for model in sorted(deltas):
            for node in sorted(deltas[model]):
                writer.writerow([model, node, deltas[model][node]])


def read_delta_csv(path) -> dict[str, dict[int, int]]:
    p = Path(path)
    if not p.is_file():
        raise DataError("file not found", path=p)
    out: dict[str, dict[int, int]] = {}
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["model", "node_id", "delta_hot_days"]:
            raise DataError(f"unexpected header {header}", path=p, line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                out.setdefault(row[0], {})[int(row[1])] = int(row[2])
            except (ValueError, IndexError) as exc:
                raise DataError(str(exc), path=p, line=lineno) from exc
    return out


def write_ensemble_csv(summary: EnsembleSummary, path, key_name: str = "node_id") -> None:
    """Export an ensemble summary (``<key>,mean,sd,min,max,n_models``)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key_name, "mean", "sd", "min", "max", "n_models"])
        for key in sorted(summary.stats):
            s = summary.stats[key]
            writer.writerow(
                [key, repr(s.mean), repr(s.sd), repr(s.min), repr(s.max), summary.n_models]
            )

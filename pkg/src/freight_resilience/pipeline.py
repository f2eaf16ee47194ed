"""Configuration, staged execution, and report emission.

A run is driven by one JSON config document and proceeds through fixed
stages: ingest, centrality, climate, simulate, report. Every output is
a CSV (canonical data) or SVG (derived plot) in one output directory,
plus a manifest listing each file with its SHA-256. Given the same
config, a re-run reproduces every byte; the config hash in the manifest
covers everything except the output directory, so runs into different
directories stay comparable.

The output directory must be empty, absent, or left over from an
earlier managed run (recognized by its manifest); anything else is
refused rather than mixed into.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

from .centrality import (
    CentralityScores,
    betweenness_exact,
    closeness_centrality,
    degree_centrality,
    rank_mapping,
    write_ranking_csv,
    write_scores_csv,
)
from .climate import (
    BASELINE,
    DEFAULT_THRESHOLD_C,
    FUTURE_FAR,
    FUTURE_NEAR,
    EnsembleSummary,
    HotDayProfile,
    PeriodSpec,
    build_hot_day_profile,
    ensemble_stats,
    hot_day_delta,
    node_series_from_grid,
    read_gridded_series_csv,
    read_profiles_csv,
    read_series_csv,
    top_k_frequency,
    write_delta_csv,
    write_ensemble_csv,
    write_profiles_csv,
)
from .disruption import (
    RANKING_MODES,
    SCENARIOS,
    TARGETED_SCENARIOS,
    RemovalSequence,
    hot_day_sequence,
    random_sequence,
    targeted_sequence,
    write_sequences_csv,
)
from .errors import ConfigError, DataError, PipelineError
from .metrics import (
    DEFAULT_COLLAPSE_THRESHOLD,
    CollapseRow,
    RobustnessCurve,
    aggregate_curves,
    collapse_point,
    read_curves_csv,
    replay,
    write_collapse_csv,
    write_curves_csv,
)
from .network import MODES, filter_mode, load_network, save_network
from .svgplot import PALETTE, Band, LineSeries, line_chart, scatter_map

THREADS_ENV = "FREIGHT_RESILIENCE_THREADS"
MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "freight-resilience-manifest/1"
STAGES = ("ingest", "centrality", "climate", "simulate", "report")

T = TypeVar("T")
U = TypeVar("U")


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class ClimateConfig:
    """Climate inputs: exactly one of series, grid_series, or profiles."""

    series: tuple[str, ...] = ()
    grid_series: tuple[str, ...] = ()
    profiles: str | None = None
    models: tuple[str, ...] = ()  # empty: use every model found in the data
    threshold_c: float = DEFAULT_THRESHOLD_C
    baseline: PeriodSpec = BASELINE
    futures: tuple[PeriodSpec, ...] = (FUTURE_NEAR, FUTURE_FAR)
    sequence_period: str | None = None  # default: first future
    top_k: int = 10

    def validate(self) -> None:
        sources = [bool(self.series), bool(self.grid_series), self.profiles is not None]
        if sum(sources) != 1:
            raise ConfigError(
                "climate: provide exactly one of series, grid_series, or profiles"
            )
        for i, path in enumerate(self.series):
            if not Path(path).is_file():
                raise ConfigError(f"climate.series[{i}]: file not found: {path}")
        for i, path in enumerate(self.grid_series):
            if not Path(path).is_file():
                raise ConfigError(f"climate.grid_series[{i}]: file not found: {path}")
        if self.profiles is not None and not Path(self.profiles).is_file():
            raise ConfigError(f"climate.profiles: file not found: {self.profiles}")
        if not math.isfinite(self.threshold_c):
            raise ConfigError("climate.threshold_c: must be finite")
        if not self.futures:
            raise ConfigError("climate.futures: need at least one future period")
        labels = [self.baseline.label] + [p.label for p in self.futures]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"climate: duplicate period labels in {labels}")
        if self.sequence_period is not None and self.sequence_period not in {
            p.label for p in self.futures
        }:
            raise ConfigError(
                f"climate.sequence_period: {self.sequence_period!r} is not a future period label"
            )
        if self.top_k < 1:
            raise ConfigError("climate.top_k: must be >= 1")

    def periods(self) -> dict[str, PeriodSpec]:
        out = {self.baseline.label: self.baseline}
        out.update({p.label: p for p in self.futures})
        return out

    def delta_period(self) -> PeriodSpec:
        if self.sequence_period is None:
            return self.futures[0]
        return next(p for p in self.futures if p.label == self.sequence_period)


@dataclass(frozen=True)
class RunConfig:
    nodes: str
    edges: str
    out_dir: str
    mode: str | None = None
    scenarios: tuple[str, ...] = SCENARIOS
    seeds: int = 10  # number of random-removal trials
    base_seed: int = 0
    ranking: str = "static"
    collapse_threshold: float = DEFAULT_COLLAPSE_THRESHOLD
    column_map: Mapping[str, str] | None = None
    climate: ClimateConfig | None = None

    def validate(self) -> None:
        for name in ("nodes", "edges"):
            path = getattr(self, name)
            if not Path(path).is_file():
                raise ConfigError(f"{name}: file not found: {path}")
        if self.mode is not None and self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {MODES}, got {self.mode!r}")
        if not self.scenarios:
            raise ConfigError("scenarios: need at least one scenario")
        seen = set()
        for i, scenario in enumerate(self.scenarios):
            if scenario not in SCENARIOS:
                raise ConfigError(
                    f"scenarios[{i}]: unknown scenario {scenario!r} (choose from {SCENARIOS})"
                )
            if scenario in seen:
                raise ConfigError(f"scenarios[{i}]: duplicate scenario {scenario!r}")
            seen.add(scenario)
        if self.seeds < 1:
            raise ConfigError(f"seeds: need at least 1 trial, got {self.seeds}")
        if self.ranking not in RANKING_MODES:
            raise ConfigError(f"ranking: must be one of {RANKING_MODES}, got {self.ranking!r}")
        if not 0.0 < self.collapse_threshold < 1.0:
            raise ConfigError(
                f"collapse_threshold: must be in (0, 1), got {self.collapse_threshold}"
            )
        if self.column_map is not None:
            for key, value in self.column_map.items():
                if not isinstance(key, str) or not isinstance(value, str):
                    raise ConfigError("column_map: keys and values must be strings")
        if "hot_days" in self.scenarios and self.climate is None:
            raise ConfigError("climate: section required for the hot_days scenario")
        if self.climate is not None:
            self.climate.validate()


_CONFIG_KEYS = {
    "nodes",
    "edges",
    "out_dir",
    "mode",
    "scenarios",
    "seeds",
    "base_seed",
    "ranking",
    "collapse_threshold",
    "column_map",
    "climate",
}

_CLIMATE_KEYS = {
    "series",
    "grid_series",
    "profiles",
    "models",
    "threshold_c",
    "baseline",
    "futures",
    "sequence_period",
    "top_k",
}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _as_period(obj, where: str) -> PeriodSpec:
    _require(isinstance(obj, dict), f"{where}: expected an object")
    _require(
        set(obj) == {"label", "start_year", "end_year"},
        f"{where}: expected keys label, start_year, end_year",
    )
    _require(isinstance(obj["label"], str), f"{where}.label: expected a string")
    for key in ("start_year", "end_year"):
        _require(isinstance(obj[key], int) and not isinstance(obj[key], bool),
                 f"{where}.{key}: expected an integer")
    try:
        return PeriodSpec(obj["label"], obj["start_year"], obj["end_year"])
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _resolve(base: Path, value: str) -> str:
    path = Path(value)
    return str(path if path.is_absolute() else base / path)


def _parse_climate(obj, base: Path) -> ClimateConfig:
    _require(isinstance(obj, dict), "climate: expected an object")
    unknown = set(obj) - _CLIMATE_KEYS
    _require(not unknown, f"climate: unknown field(s) {sorted(unknown)}")
    kwargs = {}
    for key in ("series", "grid_series"):
        if key in obj:
            value = obj[key]
            _require(
                isinstance(value, list) and all(isinstance(v, str) for v in value),
                f"climate.{key}: expected a list of file paths",
            )
            kwargs[key] = tuple(_resolve(base, v) for v in value)
    if "profiles" in obj and obj["profiles"] is not None:
        _require(isinstance(obj["profiles"], str), "climate.profiles: expected a file path")
        kwargs["profiles"] = _resolve(base, obj["profiles"])
    if "models" in obj:
        value = obj["models"]
        _require(
            isinstance(value, list) and all(isinstance(v, str) for v in value),
            "climate.models: expected a list of model names",
        )
        kwargs["models"] = tuple(value)
    if "threshold_c" in obj:
        value = obj["threshold_c"]
        _require(
            isinstance(value, (int, float)) and not isinstance(value, bool),
            "climate.threshold_c: expected a number",
        )
        kwargs["threshold_c"] = float(value)
    if "baseline" in obj:
        kwargs["baseline"] = _as_period(obj["baseline"], "climate.baseline")
    if "futures" in obj:
        value = obj["futures"]
        _require(isinstance(value, list) and value, "climate.futures: expected a non-empty list")
        kwargs["futures"] = tuple(
            _as_period(p, f"climate.futures[{i}]") for i, p in enumerate(value)
        )
    if "sequence_period" in obj and obj["sequence_period"] is not None:
        _require(
            isinstance(obj["sequence_period"], str),
            "climate.sequence_period: expected a period label",
        )
        kwargs["sequence_period"] = obj["sequence_period"]
    if "top_k" in obj:
        value = obj["top_k"]
        _require(
            isinstance(value, int) and not isinstance(value, bool),
            "climate.top_k: expected an integer",
        )
        kwargs["top_k"] = value
    return ClimateConfig(**kwargs)


def load_config(path, overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Read and validate a JSON run config.

    Paths inside the config resolve relative to the config file's
    directory. ``overrides`` (already-typed values, e.g. from CLI flags)
    replace config fields after parsing; ``threshold_c`` targets the
    climate section.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "config: top level must be an object")
    unknown = set(raw) - _CONFIG_KEYS
    _require(not unknown, f"config: unknown field(s) {sorted(unknown)}")
    base = p.parent

    kwargs: dict[str, object] = {}
    for key in ("nodes", "edges", "out_dir"):
        _require(key in raw, f"{key}: required field missing")
        _require(isinstance(raw[key], str), f"{key}: expected a file path")
        kwargs[key] = _resolve(base, raw[key])
    if raw.get("mode") is not None:
        _require(isinstance(raw["mode"], str), "mode: expected a string")
        kwargs["mode"] = raw["mode"]
    if "scenarios" in raw:
        value = raw["scenarios"]
        _require(
            isinstance(value, list) and all(isinstance(v, str) for v in value),
            "scenarios: expected a list of scenario names",
        )
        kwargs["scenarios"] = tuple(value)
    for key in ("seeds", "base_seed"):
        if key in raw:
            _require(
                isinstance(raw[key], int) and not isinstance(raw[key], bool),
                f"{key}: expected an integer",
            )
            kwargs[key] = raw[key]
    if "ranking" in raw:
        _require(isinstance(raw["ranking"], str), "ranking: expected a string")
        kwargs["ranking"] = raw["ranking"]
    if "collapse_threshold" in raw:
        value = raw["collapse_threshold"]
        _require(
            isinstance(value, (int, float)) and not isinstance(value, bool),
            "collapse_threshold: expected a number",
        )
        kwargs["collapse_threshold"] = float(value)
    if raw.get("column_map") is not None:
        _require(isinstance(raw["column_map"], dict), "column_map: expected an object")
        kwargs["column_map"] = dict(raw["column_map"])
    if raw.get("climate") is not None:
        kwargs["climate"] = _parse_climate(raw["climate"], base)

    for key, value in (overrides or {}).items():
        if key == "threshold_c":
            _require(
                kwargs.get("climate") is not None,
                "--threshold-c: requires a climate section in the config",
            )
            kwargs["climate"] = replace(kwargs["climate"], threshold_c=value)
        elif key in _CONFIG_KEYS:
            kwargs[key] = value
        else:
            raise ConfigError(f"override {key!r} is not a config field")

    config = RunConfig(**kwargs)  # type: ignore[arg-type]
    config.validate()
    return config


def config_digest_dict(config: RunConfig) -> dict:
    """Plain-dict view of a config for hashing (out_dir excluded)."""
    doc: dict[str, object] = {
        "nodes": config.nodes,
        "edges": config.edges,
        "mode": config.mode,
        "scenarios": list(config.scenarios),
        "seeds": config.seeds,
        "base_seed": config.base_seed,
        "ranking": config.ranking,
        "collapse_threshold": config.collapse_threshold,
        "column_map": dict(config.column_map) if config.column_map else None,
    }
    if config.climate is None:
        doc["climate"] = None
    else:
        cc = config.climate
        doc["climate"] = {
            "series": list(cc.series),
            "grid_series": list(cc.grid_series),
            "profiles": cc.profiles,
            "models": list(cc.models),
            "threshold_c": cc.threshold_c,
            "baseline": [cc.baseline.label, cc.baseline.start_year, cc.baseline.end_year],
            "futures": [[p.label, p.start_year, p.end_year] for p in cc.futures],
            "sequence_period": cc.sequence_period,
            "top_k": cc.top_k,
        }
    return doc


def _digest_of(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# Worker pool


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ConfigError(f"{THREADS_ENV}: expected a positive integer, got {raw!r}")
    return value


def parallel_map(fn: Callable[[T], U], items: Iterable[T]) -> list[U]:
    """Order-preserving map over the worker pool; results do not depend
    on the pool size."""
    work = list(items)
    workers = worker_count()
    if workers == 1 or len(work) <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))


# ---------------------------------------------------------------------------
# Output directory and manifest


class _Recorder:
    """Collects the relative paths of every emitted file."""

    def __init__(self, out: Path):
        self.out = out
        self.relpaths: list[str] = []

    def path(self, name: str) -> Path:
        return self.out / name

    def add(self, name: str) -> None:
        if name in self.relpaths:
            raise RuntimeError(f"output {name!r} written twice")
        self.relpaths.append(name)

    def write_text(self, name: str, content: str) -> None:
        self.path(name).write_text(content, encoding="utf-8")
        self.add(name)


def _prepare_out_dir(out: Path) -> None:
    if not out.exists():
        out.mkdir(parents=True)
        return
    if not out.is_dir():
        raise ConfigError(f"out_dir: {out} exists and is not a directory")
    if not any(out.iterdir()):
        return
    manifest = out / MANIFEST_NAME
    if not manifest.is_file():
        raise ConfigError(
            f"out_dir: {out} is non-empty and has no {MANIFEST_NAME}; refusing to overwrite"
        )
    try:
        doc = json.loads(manifest.read_text(encoding="utf-8"))
        listed = set(doc["files"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"out_dir: unreadable {MANIFEST_NAME}: {exc}") from exc
    for rel in listed:
        target = out / rel
        if target.is_file():
            target.unlink()
    manifest.unlink()
    leftovers = sorted(str(p.relative_to(out)) for p in out.rglob("*") if p.is_file())
    if leftovers:
        raise ConfigError(f"out_dir: unmanaged files present: {leftovers}")


def _write_manifest(
    out: Path,
    config_sha256: str,
    relpaths: Sequence[str],
    status: str,
    failed_stage: str | None,
) -> tuple[Path, str]:
    from . import __version__

    files = {}
    for rel in sorted(relpaths):
        data = (out / rel).read_bytes()
        if status == "complete" and not data:
            raise RuntimeError(f"declared output {rel!r} is empty")
        files[rel] = {"sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}
    doc = {
        "format": MANIFEST_FORMAT,
        "tool": {"name": "freight-resilience", "version": __version__},
        "config_sha256": config_sha256,
        "status": status,
        "failed_stage": failed_stage,
        "files": files,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    path = out / MANIFEST_NAME
    path.write_text(text, encoding="utf-8")
    return path, hashlib.sha256(text.encode("utf-8")).hexdigest()


def _verify_managed(out: Path, relpaths: Sequence[str]) -> None:
    # manifest completeness: directory contents and manifest agree
    expected = set(relpaths) | {MANIFEST_NAME}
    actual = {str(p.relative_to(out)) for p in out.rglob("*") if p.is_file()}
    if expected != actual:
        raise RuntimeError(
            f"output directory out of sync with manifest: "
            f"unlisted={sorted(actual - expected)} missing={sorted(expected - actual)}"
        )


@dataclass(frozen=True)
class ReportBundle:
    out_dir: Path
    files: tuple[str, ...]
    manifest_path: Path
    manifest_sha256: str


# ---------------------------------------------------------------------------
# Stages


def _stage_ingest(config: RunConfig, rec: _Recorder, state: dict) -> None:
    net = load_network(config.nodes, config.edges, column_map=config.column_map)
    if config.mode is not None:
        net = filter_mode(net, config.mode)
    if net.node_count == 0:
        raise DataError(f"no nodes remain after filtering mode={config.mode!r}")
    save_network(net, rec.path("network_nodes.csv"), rec.path("network_edges.csv"))
    rec.add("network_nodes.csv")
    rec.add("network_edges.csv")
    state["net"] = net


def _stage_centrality(config: RunConfig, rec: _Recorder, state: dict) -> None:
    net = state["net"]
    n = net.node_count
    deg = degree_centrality(net, normalized=False)
    deg_norm = degree_centrality(net, normalized=True)
    clo_raw = closeness_centrality(net, normalized=False)
    clo = closeness_centrality(net, normalized=True)
    exact = betweenness_exact(net)
    bet = CentralityScores("betweenness", {i: float(v) for i, v in exact.items()}, False)
    pairs = (n - 1) * (n - 2)
    bet_norm = CentralityScores(
        "betweenness",
        {i: (float(2 * v / pairs) if pairs > 0 else 0.0) for i, v in exact.items()},
        True,
    )
    write_scores_csv([deg, deg_norm, clo_raw, clo, bet, bet_norm], rec.path("centrality_scores.csv"))
    rec.add("centrality_scores.csv")

    names = {node.id: node.name for node in net.nodes}
    rankings = {
        "degree": rank_mapping({i: net.degree(i) for i in net.node_ids}, n, "degree"),
        "closeness": rank_mapping(clo.scores, n, "closeness"),
        "betweenness": rank_mapping(exact, n, "betweenness"),
    }
    for kind, ranked in rankings.items():
        name = f"ranking_{kind}.csv"
        write_ranking_csv(ranked, names, rec.path(name))
        rec.add(name)
    state["rankings"] = rankings


def _profiles_from_series(
    cc: ClimateConfig, net, state: dict
) -> dict[tuple[str, str], HotDayProfile]:
    if cc.series:
        series = read_series_csv(cc.series)
    else:
        grid, cells = read_gridded_series_csv(cc.grid_series)
        series = node_series_from_grid(net.nodes, grid, cells)
    found = sorted({model for model, _ in series})
    if not found:
        raise DataError("no daily series found in the climate inputs")
    models = list(cc.models) if cc.models else found
    missing = sorted(set(models) - set(found))
    if missing:
        raise DataError(f"no daily series for model(s) {missing}")
    periods = [cc.baseline, *cc.futures]

    def build(model: str) -> list[HotDayProfile]:
        per_node = {nid: s for (m, nid), s in series.items() if m == model}
        return [build_hot_day_profile(per_node, p, cc.threshold_c) for p in periods]

    out: dict[tuple[str, str], HotDayProfile] = {}
    for model, profs in zip(models, parallel_map(build, models)):
        for prof in profs:
            out[(model, prof.period.label)] = prof
    return out


def _stage_climate(config: RunConfig, rec: _Recorder, state: dict) -> None:
    cc = config.climate
    if cc is None:
        return
    net = state["net"]
    if cc.profiles is not None:
        profiles = {}
        for prof in read_profiles_csv(cc.profiles, cc.periods()):
            if prof.threshold_c != cc.threshold_c:
                continue  # precomputed at a different threshold: not ours
            profiles[(prof.model, prof.period.label)] = prof
        found = sorted({model for model, _ in profiles})
        if not found:
            raise DataError(
                f"{cc.profiles}: no profiles at threshold {cc.threshold_c}"
            )
        models = list(cc.models) if cc.models else found
        missing = sorted(set(models) - set(found))
        if missing:
            raise DataError(
                f"no profiles for model(s) {missing} at threshold {cc.threshold_c}"
            )
    else:
        profiles = _profiles_from_series(cc, net, state)
        models = sorted({model for model, _ in profiles})

    ordered = [profiles[key] for key in sorted(profiles) if key[0] in models]
    write_profiles_csv(ordered, rec.path("hotday_profiles.csv"))
    rec.add("hotday_profiles.csv")

    target = cc.delta_period()
    deltas: dict[str, dict[int, int]] = {}
    for model in models:
        base = profiles.get((model, cc.baseline.label))
        future = profiles.get((model, target.label))
        if base is None or future is None:
            raise DataError(
                f"model {model!r}: profiles missing for {cc.baseline.label} or {target.label}"
            )
        deltas[model] = hot_day_delta(future, base)
        uncovered = [n for n in net.node_ids if n not in deltas[model]]
        if uncovered:
            raise DataError(
                f"model {model!r}: no hot-day data for {len(uncovered)} network node(s), "
                f"first missing id {uncovered[0]}"
            )
    write_delta_csv(deltas, rec.path("hotday_deltas.csv"))
    rec.add("hotday_deltas.csv")

    ensemble = ensemble_stats(
        {m: {n: float(v) for n, v in d.items()} for m, d in deltas.items()},
        target="delta_hot_days",
    )
    write_ensemble_csv(ensemble, rec.path("hotday_ensemble.csv"), key_name="node_id")
    rec.add("hotday_ensemble.csv")

    n = net.node_count
    rankings = [
        rank_mapping({i: deltas[m][i] for i in net.node_ids}, n, "hot_days") for m in models
    ]
    k = min(cc.top_k, n)
    freq = top_k_frequency(rankings, k)
    with rec.path("hotday_topk.csv").open("w", newline="", encoding="utf-8") as fh:
        fh.write("node_id,appearances,k,n_models\n")
        for node in sorted(freq, key=lambda i: (-freq[i], i)):
            fh.write(f"{node},{freq[node]},{k},{len(models)}\n")
    rec.add("hotday_topk.csv")

    state["deltas"] = deltas
    state["hotday_ensemble"] = ensemble
    state["climate_models"] = models


def _stage_simulate(config: RunConfig, rec: _Recorder, state: dict) -> None:
    net = state["net"]
    sequences: list[RemovalSequence] = []
    by_scenario: dict[str, list[RobustnessCurve]] = {}
    for scenario in config.scenarios:
        if scenario == "random":
            seqs = [
                random_sequence(net, config.base_seed + i) for i in range(config.seeds)
            ]
        elif scenario in TARGETED_SCENARIOS:
            kind = scenario.removeprefix("targeted_")
            seqs = [targeted_sequence(net, kind, config.ranking)]
        else:  # hot_days; climate stage ran earlier per config validation
            if "deltas" not in state:
                raise DataError("hot_days scenario requires climate inputs")
            deltas = state["deltas"]
            seqs = [
                hot_day_sequence(net, deltas[m], m) for m in state["climate_models"]
            ]
        sequences.extend(seqs)
        by_scenario[scenario] = parallel_map(lambda s: replay(net, s), seqs)
    write_sequences_csv(sequences, rec.path("sequences.csv"))
    rec.add("sequences.csv")
    all_curves = [curve for scenario in config.scenarios for curve in by_scenario[scenario]]
    write_curves_csv(all_curves, rec.path("curves.csv"))
    rec.add("curves.csv")
    state["sequences"] = sequences
    state["curves_by_scenario"] = by_scenario


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _collapse_rows(
    by_scenario: Mapping[str, Sequence[RobustnessCurve]],
    scenario_order: Sequence[str],
    threshold: float,
) -> list[CollapseRow]:
    """One row per (scenario, model) cell; random seeds collapse to their
    mean fraction. A cell where any curve never collapses reports None."""
    rows = []
    for scenario in scenario_order:
        cells: dict[str | None, list[RobustnessCurve]] = {}
        for curve in by_scenario[scenario]:
            cells.setdefault(curve.model, []).append(curve)
        for model, curves in cells.items():
            points = [collapse_point(c, threshold) for c in curves]
            if any(p is None for p in points):
                value = None
            else:
                value = _mean([frac for _, frac in points])
            rows.append(CollapseRow(scenario, model, threshold, value))
    return rows


def _plot_series(
    by_scenario: Mapping[str, Sequence[RobustnessCurve]],
    scenario_order: Sequence[str],
    value_of: Callable[[object], float],
    limits: Mapping[str, int],
) -> tuple[list[LineSeries], list[Band]]:
    series: list[LineSeries] = []
    bands: list[Band] = []
    for i, scenario in enumerate(scenario_order):
        curves = by_scenario[scenario]
        color = PALETTE[i % len(PALETTE)]
        cut = limits.get(scenario, len(curves[0].steps) - 1)
        steps = range(cut + 1)
        if len(curves) == 1:
            pts = tuple(
                (curves[0].steps[k].fraction_removed, value_of(curves[0].steps[k]))
                for k in steps
            )
            label = scenario
        else:
            pts = tuple(
                (
                    curves[0].steps[k].fraction_removed,
                    _mean([value_of(c.steps[k]) for c in curves]),
                )
                for k in steps
            )
            lo = tuple(
                (
                    curves[0].steps[k].fraction_removed,
                    min(value_of(c.steps[k]) for c in curves),
                )
                for k in steps
            )
            hi = tuple(
                (
                    curves[0].steps[k].fraction_removed,
                    max(value_of(c.steps[k]) for c in curves),
                )
                for k in steps
            )
            bands.append(Band(lo=lo, hi=hi, color=color))
            label = f"{scenario} (mean of {len(curves)})"
        series.append(LineSeries(label=label, points=pts, color=color))
    return series, bands


def _plot_limits(sequences: Sequence[RemovalSequence]) -> dict[str, int]:
    # hot-day plots stop once every model has run out of positively
    # affected nodes; the CSVs keep the full curves
    hot = [s for s in sequences if s.scenario == "hot_days"]
    if not hot:
        return {}
    boundary = max(len(s.order) - len(s.beyond_criterion) for s in hot)
    return {"hot_days": max(boundary, 1)}


def emit_report(
    by_scenario: Mapping[str, Sequence[RobustnessCurve]],
    scenario_order: Sequence[str],
    threshold: float,
    rec: _Recorder,
    *,
    mode: str | None = None,
    sequences: Sequence[RemovalSequence] = (),
    map_points: Sequence[tuple[float, float, float]] = (),
) -> None:
    """Collapse tables, per-step ensembles, and SVG plots from curves."""
    rows = _collapse_rows(by_scenario, scenario_order, threshold)
    write_collapse_csv(rows, rec.path("collapse.csv"))
    rec.add("collapse.csv")

    with rec.path("collapse_ensemble.csv").open("w", newline="", encoding="utf-8") as fh:
        fh.write("scenario,threshold,mean,sd,min,max,n_curves\n")
        for scenario in scenario_order:
            curves = by_scenario[scenario]
            ens = aggregate_curves(curves, threshold)
            if ens.collapse is None:
                fh.write(f"{scenario},{threshold!r},,,,,{ens.n_curves}\n")
            else:
                s = ens.collapse
                fh.write(
                    f"{scenario},{threshold!r},{s.mean!r},{s.sd!r},{s.min!r},{s.max!r},"
                    f"{ens.n_curves}\n"
                )
            if ens.n_curves > 1:
                for target, stats in (("scf", ens.scf), ("tonnage_fraction", ens.tonnage_fraction)):
                    name = f"ensemble_{target}_{scenario}.csv"
                    summary = EnsembleSummary(target=target, stats=stats, n_models=ens.n_curves)
                    write_ensemble_csv(summary, rec.path(name), key_name="step")
                    rec.add(name)
    rec.add("collapse_ensemble.csv")

    limits = _plot_limits(sequences)
    where = f" ({mode})" if mode else ""
    series, bands = _plot_series(by_scenario, scenario_order, lambda s: s.scf, limits)
    rec.write_text(
        "robustness.svg",
        line_chart(
            series,
            title=f"Robustness under node disruption{where}",
            x_label="fraction of nodes removed",
            y_label="SCF",
            bands=bands,
        ),
    )
    series, bands = _plot_series(
        by_scenario, scenario_order, lambda s: s.tonnage_fraction, limits
    )
    rec.write_text(
        "tonnage.svg",
        line_chart(
            series,
            title=f"Tonnage capacity under node disruption{where}",
            x_label="fraction of nodes removed",
            y_label="tonnage fraction",
            bands=bands,
        ),
    )
    if map_points:
        rec.write_text(
            "hotday_map.svg",
            scatter_map(
                map_points,
                title="Projected change in hot days per year-window",
                value_label="delta",
            ),
        )


def _stage_report(config: RunConfig, rec: _Recorder, state: dict) -> None:
    net = state["net"]
    map_points: list[tuple[float, float, float]] = []
    if "hotday_ensemble" in state:
        stats = state["hotday_ensemble"].stats
        map_points = [
            (node.lon, node.lat, stats[node.id].mean) for node in net.nodes if node.id in stats
        ]
    emit_report(
        state["curves_by_scenario"],
        config.scenarios,
        config.collapse_threshold,
        rec,
        mode=config.mode,
        sequences=state.get("sequences", ()),
        map_points=map_points,
    )


_STAGE_FNS = {
    "ingest": _stage_ingest,
    "centrality": _stage_centrality,
    "climate": _stage_climate,
    "simulate": _stage_simulate,
    "report": _stage_report,
}


def run(config: RunConfig, stages: Sequence[str] = STAGES) -> ReportBundle:
    """Execute the pipeline and return the emitted bundle.

    On a stage failure the manifest is still written, with status
    "incomplete" and the failing stage's name, then the error is
    re-raised wrapped as PipelineError.
    """
    unknown = [s for s in stages if s not in _STAGE_FNS]
    if unknown:
        raise ConfigError(f"unknown stage(s) {unknown}")
    config.validate()
    out = Path(config.out_dir)
    _prepare_out_dir(out)
    rec = _Recorder(out)
    state: dict = {}
    digest = _digest_of(config_digest_dict(config))
    current = "setup"
    try:
        for name in STAGES:
            if name not in stages:
                continue
            current = name
            _STAGE_FNS[name](config, rec, state)
    except Exception as exc:
        _write_manifest(out, digest, rec.relpaths, "incomplete", current)
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(current, exc) from exc
    manifest_path, manifest_sha = _write_manifest(out, digest, rec.relpaths, "complete", None)
    _verify_managed(out, rec.relpaths)
    return ReportBundle(
        out_dir=out,
        files=tuple(rec.relpaths),
        manifest_path=manifest_path,
        manifest_sha256=manifest_sha,
    )


def report_from_curves(curves_csv, out_dir, threshold: float = DEFAULT_COLLAPSE_THRESHOLD) -> ReportBundle:
    """Rebuild collapse tables, ensembles, and plots from a curves CSV."""
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"collapse threshold must be in (0, 1), got {threshold}")
    curves = read_curves_csv(curves_csv)
    if not curves:
        raise DataError("curves file contains no curves", path=curves_csv)
    by_scenario: dict[str, list[RobustnessCurve]] = {}
    order: list[str] = []
    for curve in curves:
        if curve.scenario not in by_scenario:
            order.append(curve.scenario)
        by_scenario.setdefault(curve.scenario, []).append(curve)
    out = Path(out_dir)
    _prepare_out_dir(out)
    rec = _Recorder(out)
    digest = _digest_of({"curves_csv": str(curves_csv), "collapse_threshold": threshold})
    try:
        emit_report(by_scenario, order, threshold, rec)
    except Exception as exc:
        _write_manifest(out, digest, rec.relpaths, "incomplete", "report")
        raise PipelineError("report", exc) from exc
    manifest_path, manifest_sha = _write_manifest(out, digest, rec.relpaths, "complete", None)
    _verify_managed(out, rec.relpaths)
    return ReportBundle(
        out_dir=out,
        files=tuple(rec.relpaths),
        manifest_path=manifest_path,
        manifest_sha256=manifest_sha,
    )

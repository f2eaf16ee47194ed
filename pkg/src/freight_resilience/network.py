"""Freight network data model and CSV ingestion.

Networks are undirected, unweighted graphs whose nodes are freight
facilities (rail stations, water ports) carrying a projected tonnage.
Edges are stored exactly once per unordered pair; inputs that list both
directions of a link are collapsed. Network values are immutable after
construction, so they can be shared freely between workers; every
mutating-style operation returns a new value.

CSV schemas:
    nodes: ``id,name,mode,lat,lon,tonnage``   (UTF-8, mode in {rail, water})
    edges: ``src,dst``                        (ids must exist in the nodes file)

``save_network`` emits the canonical form: rows sorted by id / (min, max)
pair, shortest round-trip float formatting, ``\\n`` line endings. Exporting
a freshly loaded canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DataError

MODES = ("rail", "water")

NODE_COLUMNS = ("id", "name", "mode", "lat", "lon", "tonnage")
EDGE_COLUMNS = ("src", "dst")


@dataclass(frozen=True)
class NodeRecord:
    """One freight facility.

    Tonnage is a node attribute: the total projected load transported
    from or through the facility for the scenario year. The loader does
    not interpret whether the source column counts originating,
    terminating, or through traffic; the column is taken as supplied.
    """

    id: int
    name: str
    mode: str
    lat: float
    lon: float
    tonnage: float

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"node {self.id}: mode must be one of {MODES}, got {self.mode!r}")
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"node {self.id}: lat {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"node {self.id}: lon {self.lon} outside [-180, 180]")
        if not (math.isfinite(self.tonnage) and self.tonnage >= 0.0):
            raise ValueError(f"node {self.id}: tonnage must be finite and >= 0, got {self.tonnage}")


@dataclass(frozen=True)
class FreightNetwork:
    """Immutable undirected graph of freight nodes.

    ``nodes`` is sorted by id; ``edges`` holds each undirected edge once
    as an ``(lo, hi)`` id pair in sorted order. Use :meth:`build` to
    construct from unnormalized inputs (it collapses duplicate and
    reversed edges); the bare constructor validates but does not repair.
    """

    nodes: tuple[NodeRecord, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if ids != sorted(ids):
            raise ValueError("nodes must be sorted by id")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node id")
        known = set(ids)
        prev = None
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if a > b:
                raise ValueError(f"edge ({a}, {b}) not stored as (min, max)")
            if a not in known or b not in known:
                raise ValueError(f"edge ({a}, {b}) references unknown node id")
            if prev is not None and (a, b) <= prev:
                raise ValueError("edges must be sorted and unique")
            prev = (a, b)

    @classmethod
    def build(
        cls,
        nodes: Iterable[NodeRecord],
        edges: Iterable[tuple[int, int]],
    ) -> "FreightNetwork":
        """Construct from arbitrary node/edge order, collapsing duplicate
        undirected edges. Raises ValueError on self-loops, duplicate node
        ids, or edges referencing unknown ids."""
        node_tuple = tuple(sorted(nodes, key=lambda n: n.id))
        ids = {n.id for n in node_tuple}
        if len(ids) != len(node_tuple):
            raise ValueError("duplicate node id")
        canon = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if a not in ids or b not in ids:
                raise ValueError(f"edge ({a}, {b}) references unknown node id")
            canon.add((a, b) if a < b else (b, a))
        return cls(node_tuple, tuple(sorted(canon)))

    @cached_property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def node_by_id(self) -> Mapping[int, NodeRecord]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def adjacency(self) -> Mapping[int, tuple[int, ...]]:
        neigh: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for a, b in self.edges:
            neigh[a].append(b)
            neigh[b].append(a)
        return {i: tuple(sorted(v)) for i, v in neigh.items()}

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, node_id: int) -> int:
        return len(self.adjacency[node_id])


def average_degree(net: FreightNetwork) -> float:
    """Mean node degree, 2E/N. Raises ValueError on an empty network."""
    if net.node_count == 0:
        raise ValueError("average degree undefined for an empty network")
    return 2.0 * net.edge_count / net.node_count


def remove_nodes(net: FreightNetwork, ids: Sequence[int]) -> FreightNetwork:
    """Return a new network with ``ids`` and all incident edges removed.

    Raises ValueError if an id is unknown or appears twice in ``ids``.
    The input network is unchanged.
    """
    drop = set(ids)
    if len(drop) != len(ids):
        raise ValueError("duplicate id in removal list")
    unknown = drop - set(net.node_ids)
    if unknown:
        raise ValueError(f"unknown node id(s): {sorted(unknown)}")
    keep_nodes = tuple(n for n in net.nodes if n.id not in drop)
    keep_edges = tuple((a, b) for a, b in net.edges if a not in drop and b not in drop)
    return FreightNetwork(keep_nodes, keep_edges)


def filter_mode(net: FreightNetwork, mode: str) -> FreightNetwork:
    """Subnetwork induced on nodes of the given mode (rail or water)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    keep = tuple(n for n in net.nodes if n.mode == mode)
    kept_ids = {n.id for n in keep}
    edges = tuple((a, b) for a, b in net.edges if a in kept_ids and b in kept_ids)
    return FreightNetwork(keep, edges)


def _open_rows(path):
    p = Path(path)
    if not p.is_file():
        raise DataError("file not found", path=p)
    with p.open(newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def _header_index(rows, columns, column_map, path):
    """Map canonical column names to positions in the file header.

    ``column_map`` renames canonical -> actual header names, which lets the
    loader consume exports whose tonnage/coordinate columns vary by tool
    version. Extra columns are ignored.
    """
    if not rows:
        raise DataError("empty file, expected header row", path=path, line=1)
    header = [h.strip() for h in rows[0]]
    mapping = dict(column_map or {})
    index = {}
    for name in columns:
        actual = mapping.get(name, name)
        if actual not in header:
            raise DataError(f"missing column {actual!r} in header {header}", path=path, line=1)
        index[name] = header.index(actual)
    return index, len(header)


def load_network(
    nodes_table,
    edges_table,
    column_map: Mapping[str, str] | None = None,
) -> FreightNetwork:
    """Load and validate a network from nodes/edges CSV files.

    Duplicate undirected edges (including both orientations of the same
    link) are collapsed; row order never affects the result. Errors are
    reported as DataError with the offending file and line number.
    """
    node_rows = _open_rows(nodes_table)
    idx, width = _header_index(node_rows, NODE_COLUMNS, column_map, nodes_table)
    nodes: list[NodeRecord] = []
    seen: dict[int, int] = {}
    for lineno, row in enumerate(node_rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise DataError(
                f"expected {width} fields, got {len(row)}", path=nodes_table, line=lineno
            )
        try:
            rec = NodeRecord(
                id=int(row[idx["id"]]),
                name=row[idx["name"]],
                mode=row[idx["mode"]].strip(),
                lat=float(row[idx["lat"]]),
                lon=float(row[idx["lon"]]),
                tonnage=float(row[idx["tonnage"]]),
            )
        except ValueError as exc:
            raise DataError(str(exc), path=nodes_table, line=lineno) from exc
        if rec.id in seen:
            raise DataError(
                f"duplicate node id {rec.id} (first seen on line {seen[rec.id]})",
                path=nodes_table,
                line=lineno,
            )
        seen[rec.id] = lineno
        nodes.append(rec)

    edge_rows = _open_rows(edges_table)
    eidx, ewidth = _header_index(edge_rows, EDGE_COLUMNS, column_map, edges_table)
    known = set(seen)
    edges: set[tuple[int, int]] = set()
    for lineno, row in enumerate(edge_rows[1:], start=2):
        if not row:
            continue
        if len(row) != ewidth:
            raise DataError(
                f"expected {ewidth} fields, got {len(row)}", path=edges_table, line=lineno
            )
        try:
            a = int(row[eidx["src"]])
            b = int(row[eidx["dst"]])
        except ValueError as exc:
            raise DataError(str(exc), path=edges_table, line=lineno) from exc
        if a == b:
            raise DataError(f"self-loop at node {a}", path=edges_table, line=lineno)
        for endpoint in (a, b):
            if endpoint not in known:
                raise DataError(
                    f"edge references unknown node id {endpoint}", path=edges_table, line=lineno
                )
        edges.add((a, b) if a < b else (b, a))

    return FreightNetwork(tuple(sorted(nodes, key=lambda n: n.id)), tuple(sorted(edges)))


def save_network(net: FreightNetwork, nodes_path, edges_path) -> None:
    """Export to the canonical CSV form (sorted, round-trip stable)."""
    with Path(nodes_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(NODE_COLUMNS)
        for n in net.nodes:
            writer.writerow([n.id, n.name, n.mode, repr(n.lat), repr(n.lon), repr(n.tonnage)])
    with Path(edges_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGE_COLUMNS)
        for a, b in net.edges:
            writer.writerow([a, b])

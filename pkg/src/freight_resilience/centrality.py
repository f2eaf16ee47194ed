"""Degree, closeness, and betweenness centrality with deterministic rankings.

Shortest paths are hop counts (the freight networks are unweighted and
bidirectional). Betweenness follows the unordered-pair convention: each
pair {s, t} contributes once. Summing over ordered pairs, as some
definitions do, exactly doubles every score on an undirected graph and
leaves all rankings and removal orders unchanged.

Path counts are exact integers and Brandes' accumulation runs in exact
rational arithmetic, so scores are independent of node iteration order
and safe to compare exactly against pairwise path-count oracles. Floats
appear only once, in the final conversion of each score.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .network import FreightNetwork

CENTRALITY_KINDS = ("degree", "closeness", "betweenness")
RANKING_KINDS = CENTRALITY_KINDS + ("hot_days",)


@dataclass(frozen=True)
class CentralityScores:
    """Per-node scores for one centrality kind.

    Every node of the source network has exactly one score; normalized
    scores lie in [0, 1].
    """

    kind: str
    scores: Mapping[int, float]
    normalized: bool

    def __post_init__(self):
        if self.kind not in CENTRALITY_KINDS:
            raise ValueError(f"kind must be one of {CENTRALITY_KINDS}, got {self.kind!r}")
        for node, value in self.scores.items():
            if value < 0:
                raise ValueError(f"negative score {value} for node {node}")
            if self.normalized and value > 1:
                raise ValueError(f"normalized score {value} > 1 for node {node}")


@dataclass(frozen=True)
class RankedNodes:
    """Top-k nodes ordered by non-increasing score, ties by ascending id."""

    kind: str
    entries: tuple[tuple[int, int, float], ...]  # (rank, node_id, score)

    def __post_init__(self):
        if self.kind not in RANKING_KINDS:
            raise ValueError(f"kind must be one of {RANKING_KINDS}, got {self.kind!r}")
        for i, (rank, node, score) in enumerate(self.entries):
            if rank != i + 1:
                raise ValueError("ranks must be 1..k in order")
            if i:
                prev = self.entries[i - 1]
                if score > prev[2] or (score == prev[2] and node < prev[1]):
                    raise ValueError("entries must be sorted by (-score, id)")

    @property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(node for _, node, _ in self.entries)


def _bfs_counts(adj: Mapping[int, tuple[int, ...]], source: int):
    """Hop distances, shortest-path counts, predecessor lists, and BFS order."""
    dist = {source: 0}
    sigma = {source: 1}
    preds: dict[int, list[int]] = {source: []}
    order = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        dv1 = dist[v] + 1
        sv = sigma[v]
        for w in adj[v]:
            if w not in dist:
                dist[w] = dv1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dv1:
                sigma[w] += sv
                preds[w].append(v)
    return dist, sigma, preds, order


def degree_centrality(net: FreightNetwork, normalized: bool = False) -> CentralityScores:
    """Score(i) = number of neighbors; normalized divides by (n - 1)."""
    n = net.node_count
    raw = {i: len(net.adjacency[i]) for i in net.node_ids}
    if normalized:
        scores = {i: (d / (n - 1) if n > 1 else 0.0) for i, d in raw.items()}
    else:
        scores = {i: float(d) for i, d in raw.items()}
    return CentralityScores("degree", scores, normalized)


def closeness_centrality(net: FreightNetwork, normalized: bool = True) -> CentralityScores:
    """Closeness by proximity to all reachable nodes.

    Raw score of node i is 1 / sum of hop distances to its reachable set
    R(i). The normalized form applies the component-size correction
    (|R| / (n - 1)) * (|R| / sum dist), which keeps scores in [0, 1] on
    disconnected graphs where plain inverse distance is undefined.
    Isolated nodes score 0.
    """
    n = net.node_count
    scores: dict[int, float] = {}
    for i in net.node_ids:
        dist, _, _, order = _bfs_counts(net.adjacency, i)
        reach = len(order) - 1
        if reach == 0:
            scores[i] = 0.0
            continue
        total = sum(dist[v] for v in order)
        if normalized:
            scores[i] = float(Fraction(reach * reach, (n - 1) * total)) if n > 1 else 0.0
        else:
            scores[i] = float(Fraction(1, total))
    return CentralityScores("closeness", scores, normalized)


def betweenness_exact(net: FreightNetwork) -> dict[int, Fraction]:
    """Unordered-pair betweenness as exact rationals (Brandes' accumulation)."""
    bc = {i: Fraction(0) for i in net.node_ids}
    adj = net.adjacency
    for s in net.node_ids:
        _, sigma, preds, order = _bfs_counts(adj, s)
        delta = {v: Fraction(0) for v in order}
        for w in reversed(order):
            coeff = (1 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was counted from both endpoints
    return {i: value / 2 for i, value in bc.items()}


def betweenness_centrality(net: FreightNetwork, normalized: bool = False) -> CentralityScores:
    """Shortest-path betweenness over unordered pairs {s, t}, s != t != i.

    Pairs with no connecting path contribute 0. The normalized variant
    divides by (n - 1)(n - 2) / 2, the number of pairs excluding i.
    """
    n = net.node_count
    exact = betweenness_exact(net)
    if normalized:
        pairs = (n - 1) * (n - 2)  # == 2 * C(n-1, 2)
        if pairs <= 0:
            return CentralityScores("betweenness", {i: 0.0 for i in exact}, True)
        scores = {i: float(2 * value / pairs) for i, value in exact.items()}
    else:
        scores = {i: float(value) for i, value in exact.items()}
    return CentralityScores("betweenness", scores, normalized)


def rank_mapping(values: Mapping[int, float], k: int, kind: str) -> RankedNodes:
    """Top-k ids from an arbitrary score mapping (ties by ascending id)."""
    if not 1 <= k <= len(values):
        raise ValueError(f"k must be in [1, {len(values)}], got {k}")
    ordered = sorted(values.items(), key=lambda item: (-values[item[0]], item[0]))
    entries = tuple(
        (rank, node, float(score)) for rank, (node, score) in enumerate(ordered[:k], start=1)
    )
    return RankedNodes(kind, entries)


def rank_nodes(scores: CentralityScores, k: int) -> RankedNodes:
    """Top-k by descending score; deterministic (ties by ascending node id)."""
    return rank_mapping(scores.scores, k, scores.kind)


def write_scores_csv(all_scores: Sequence[CentralityScores], path) -> None:
    """Export score sets as ``node_id,kind,score,normalized`` rows."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "kind", "score", "normalized"])
        for cs in all_scores:
            for node in sorted(cs.scores):
                writer.writerow([node, cs.kind, repr(cs.scores[node]), str(cs.normalized).lower()])


def write_ranking_csv(ranked: RankedNodes, names: Mapping[int, str], path) -> None:
    """Export a ranking as ``rank,node_id,name,score`` rows."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "node_id", "name", "score"])
        for rank, node, score in ranked.entries:
            writer.writerow([rank, node, names.get(node, ""), repr(score)])

"""Shared graph builders and brute-force oracles.

The oracles deliberately take different routes than the library code:
closeness distances come from a numpy min-plus Floyd-Warshall instead of
per-source BFS, betweenness from pairwise path counting instead of
dependency accumulation, and component sizes from per-state flood fill
instead of incremental union-find. Agreement between routes is the
point; none of them may be "simplified" to call the code under test.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from freight_resilience.network import FreightNetwork, NodeRecord


def make_node(
    i: int,
    ton: float = 1.0,
    mode: str = "rail",
    lat: float | None = None,
    lon: float | None = None,
    name: str | None = None,
) -> NodeRecord:
    return NodeRecord(
        id=i,
        name=name if name is not None else f"node-{i}",
        mode=mode,
        lat=30.0 + (i % 7) if lat is None else lat,
        lon=-100.0 + (i % 11) if lon is None else lon,
        tonnage=ton,
    )


def make_net(n: int, edges, tons=None, mode: str = "rail") -> FreightNetwork:
    tons = tons or {}
    nodes = [make_node(i, ton=float(tons.get(i, 1.0)), mode=mode) for i in range(1, n + 1)]
    return FreightNetwork.build(nodes, edges)


def er_edges(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    """Erdos-Renyi edge list over ids 1..n."""
    return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < p]


def star_net(n: int, tons=None) -> FreightNetwork:
    """Hub id 1 with n - 1 leaves."""
    return make_net(n, [(1, i) for i in range(2, n + 1)], tons=tons)


def path_net(n: int, tons=None) -> FreightNetwork:
    return make_net(n, [(i, i + 1) for i in range(1, n)], tons=tons)


@pytest.fixture
def path3() -> FreightNetwork:
    return path_net(3)


@pytest.fixture
def star5() -> FreightNetwork:
    return star_net(5)


# ---------------------------------------------------------------------------
# Centrality oracles


def oracle_distance_matrix(net: FreightNetwork) -> np.ndarray:
    """All-pairs hop distances by min-plus Floyd-Warshall (inf = unreachable)."""
    ids = net.node_ids
    n = len(ids)
    pos = {v: k for k, v in enumerate(ids)}
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for a, b in net.edges:
        dist[pos[a], pos[b]] = 1.0
        dist[pos[b], pos[a]] = 1.0
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def oracle_closeness(net: FreightNetwork, normalized: bool = True) -> dict[int, float]:
    ids = net.node_ids
    n = len(ids)
    dist = oracle_distance_matrix(net)
    out = {}
    for k, v in enumerate(ids):
        finite = dist[k][np.isfinite(dist[k])]
        reach = len(finite) - 1  # excludes self
        if reach == 0:
            out[v] = 0.0
            continue
        total = float(finite.sum())
        if normalized:
            out[v] = (reach / (n - 1)) * (reach / total) if n > 1 else 0.0
        else:
            out[v] = 1.0 / total
    return out


def _bfs_dist_sigma(adj, source):
    dist = {source: 0}
    sigma = {source: 1}
    queue = [source]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
    return dist, sigma


def oracle_betweenness(net: FreightNetwork) -> dict[int, Fraction]:
    """Unordered-pair betweenness by explicit pairwise path counting.

    v lies on a shortest s-t path iff d(s,v) + d(v,t) = d(s,t); its share
    of the pair is sigma(s,v) * sigma(v,t) / sigma(s,t). Integer
    numerators are bucketed per denominator so the final Fractions are
    exact without per-pair rational arithmetic.
    """
    ids = net.node_ids
    adj = net.adjacency
    per_source = {s: _bfs_dist_sigma(adj, s) for s in ids}
    buckets: dict[int, dict[int, int]] = {v: {} for v in ids}
    for i, s in enumerate(ids):
        dist_s, sigma_s = per_source[s]
        for t in ids[i + 1 :]:
            if t not in dist_s:
                continue  # disconnected pair contributes nothing
            dist_t, sigma_t = per_source[t]
            d_st = dist_s[t]
            den = sigma_s[t]
            for v in ids:
                if v == s or v == t or v not in dist_s or v not in dist_t:
                    continue
                if dist_s[v] + dist_t[v] == d_st:
                    num = sigma_s[v] * sigma_t[v]
                    if num:
                        bucket = buckets[v]
                        bucket[den] = bucket.get(den, 0) + num
    return {
        v: sum((Fraction(num, den) for den, num in sorted(bucket.items())), Fraction(0))
        for v, bucket in buckets.items()
    }


def oracle_degree(net: FreightNetwork) -> dict[int, int]:
    out = {v: 0 for v in net.node_ids}
    for a, b in net.edges:
        out[a] += 1
        out[b] += 1
    return out


# ---------------------------------------------------------------------------
# Replay oracle


def flood_fill_components(ids, edges) -> list[set[int]]:
    adj = {v: set() for v in ids}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = set()
    comps = []
    for start in ids:
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        seen.add(start)
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    frontier.append(w)
        comps.append(comp)
    return comps


def oracle_curve_states(net: FreightNetwork, order) -> list[tuple[int, Fraction, Fraction]]:
    """(ff, gcc tonnage, remaining tonnage) after each prefix of ``order``,
    by rebuilding the surviving graph from scratch at every step."""
    tons = {v: Fraction(rec.tonnage) for v, rec in net.node_by_id.items()}
    states = []
    for k in range(len(order) + 1):
        removed = set(order[:k])
        ids = [v for v in net.node_ids if v not in removed]
        edges = [(a, b) for a, b in net.edges if a not in removed and b not in removed]
        comps = flood_fill_components(ids, edges)
        if comps:
            ff = max(len(c) for c in comps)
            gcc_ton = max(
                (sum((tons[v] for v in c), Fraction(0)) for c in comps if len(c) == ff),
                default=Fraction(0),
            )
        else:
            ff = 0
            gcc_ton = Fraction(0)
        remaining = sum((tons[v] for v in ids), Fraction(0))
        states.append((ff, gcc_ton, remaining))
    return states

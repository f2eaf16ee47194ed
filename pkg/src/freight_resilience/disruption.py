"""Node removal orders for disruption experiments.

Three ways to order removals: uniformly random (seeded), by centrality
(highest first, either ranked once on the intact network or re-ranked
after every removal), and by projected hot-day increase (largest gain
first). In the hot-day order, nodes whose change is zero or negative
are appended after all positively affected nodes and tagged as beyond
the selection criterion, so downstream consumers can truncate or plot
the criterion-driven prefix.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .centrality import CENTRALITY_KINDS, betweenness_exact, closeness_centrality
from .network import FreightNetwork, remove_nodes

TARGETED_SCENARIOS = ("targeted_degree", "targeted_closeness", "targeted_betweenness")

SCENARIOS = ("random",) + TARGETED_SCENARIOS + ("hot_days",)

RANKING_MODES = ("static", "adaptive")


@dataclass(frozen=True)
class RemovalSequence:
    """A full removal order over a network's nodes.

    ``model`` identifies the climate model behind a hot-day order and
    ``seed`` the RNG seed behind a random order; both stay None where
    they do not apply. ``beyond_criterion`` marks hot-day entries whose
    projected change was not positive.
    """

    scenario: str
    order: tuple[int, ...]
    mode: str = "static"
    model: str | None = None
    seed: int | None = None
    beyond_criterion: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.mode not in RANKING_MODES:
            raise ValueError(f"unknown ranking mode {self.mode!r}")
        if self.scenario not in TARGETED_SCENARIOS and self.mode != "static":
            raise ValueError("ranking mode applies only to targeted scenarios")
        if len(set(self.order)) != len(self.order):
            raise ValueError("removal order contains duplicate nodes")
        if self.scenario == "random" and self.seed is None:
            raise ValueError("random sequences must record their seed")
        if self.scenario == "hot_days" and self.model is None:
            raise ValueError("hot-day sequences must record their climate model")
        if self.beyond_criterion and self.scenario != "hot_days":
            raise ValueError("beyond_criterion applies only to hot-day sequences")
        if not self.beyond_criterion <= set(self.order):
            raise ValueError("beyond_criterion must be a subset of the order")

    def __len__(self) -> int:
        return len(self.order)

    def truncated(self, k: int) -> "RemovalSequence":
        """The first k removals as a sequence of their own."""
        if not 0 <= k <= len(self.order):
            raise ValueError(f"k={k} outside [0, {len(self.order)}]")
        head = self.order[:k]
        return RemovalSequence(
            scenario=self.scenario,
            order=head,
            mode=self.mode,
            model=self.model,
            seed=self.seed,
            beyond_criterion=self.beyond_criterion & set(head),
        )


def _rand_below(rng: random.Random, n: int) -> int:
    # rejection sampling over getrandbits: unbiased, and stable across
    # Python versions (randrange's internals are not guaranteed)
    bits = n.bit_length()
    value = rng.getrandbits(bits)
    while value >= n:
        value = rng.getrandbits(bits)
    return value


def _shuffled(items: Sequence[int], rng: random.Random) -> list[int]:
    # Fisher-Yates, spelled out so the draw sequence is pinned by this
    # module rather than by random.shuffle's implementation
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = _rand_below(rng, i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def random_sequence(net: FreightNetwork, seed: int) -> RemovalSequence:
    """Uniformly random removal order, reproducible from the seed."""
    rng = random.Random(seed)
    order = _shuffled(net.node_ids, rng)
    return RemovalSequence(scenario="random", order=tuple(order), seed=seed)


def _scores(net: FreightNetwork, kind: str) -> Mapping[int, object]:
    # raw (unnormalized) values: rankings are what matter here, and the
    # raw forms are exact (int degrees, rational betweenness)
    if kind == "degree":
        return {i: net.degree(i) for i in net.node_ids}
    if kind == "closeness":
        return closeness_centrality(net).scores
    if kind == "betweenness":
        return betweenness_exact(net)
    raise ValueError(f"unknown centrality kind {kind!r}")


def targeted_sequence(
    net: FreightNetwork, kind: str, mode: str = "static"
) -> RemovalSequence:
    """Highest-centrality-first removal order.

    Static mode ranks the intact network once; adaptive mode re-scores
    the surviving subnetwork before every removal. Ties break toward
    the lower node id in both modes.
    """
    if kind not in CENTRALITY_KINDS:
        raise ValueError(f"unknown centrality kind {kind!r}")
    if mode not in RANKING_MODES:
        raise ValueError(f"unknown ranking mode {mode!r}")
    scenario = f"targeted_{kind}"
    if mode == "static":
        scores = _scores(net, kind)
        order = sorted(scores, key=lambda n: (-scores[n], n))
        return RemovalSequence(scenario=scenario, order=tuple(order), mode=mode)
    order = []
    current = net
    while current.node_count > 0:
        scores = _scores(current, kind)
        victim = min(scores, key=lambda n: (-scores[n], n))
        order.append(victim)
        current = remove_nodes(current, [victim])
    return RemovalSequence(scenario=scenario, order=tuple(order), mode=mode)


def hot_day_sequence(
    net: FreightNetwork, delta: Mapping[int, int], model: str
) -> RemovalSequence:
    """Removal order by projected hot-day increase, largest first.

    Nodes with a zero or negative change follow the affected ones (still
    in decreasing-change order) and are tagged beyond_criterion. Every
    network node needs a delta; extra delta entries are ignored.
    """
    missing = [n for n in net.node_ids if n not in delta]
    if missing:
        raise ValueError(f"missing hot-day delta for nodes {missing}")
    order = sorted(net.node_ids, key=lambda n: (-delta[n], n))
    beyond = frozenset(n for n in order if delta[n] <= 0)
    return RemovalSequence(
        scenario="hot_days", order=tuple(order), model=model, beyond_criterion=beyond
    )


def build_sequence(
    net: FreightNetwork,
    scenario: str,
    *,
    ranking: str = "static",
    seed: int | None = None,
    delta: Mapping[int, int] | None = None,
    model: str | None = None,
) -> RemovalSequence:
    """Dispatch to the right generator for a scenario name."""
    if scenario == "random":
        if seed is None:
            raise ValueError("random scenario needs a seed")
        return random_sequence(net, seed)
    if scenario in TARGETED_SCENARIOS:
        return targeted_sequence(net, scenario.removeprefix("targeted_"), ranking)
    if scenario == "hot_days":
        if delta is None or model is None:
            raise ValueError("hot_days scenario needs a delta mapping and model name")
        return hot_day_sequence(net, delta, model)
    raise ValueError(f"unknown scenario {scenario!r}")


def write_sequences_csv(sequences: Sequence[RemovalSequence], path) -> None:
    """Export removal orders, one row per step, steps numbered from 1."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "node_id", "scenario", "model", "seed", "beyond_criterion"])
        for seq in sequences:
            for step, node in enumerate(seq.order, start=1):
                writer.writerow(
                    [
                        step,
                        node,
                        seq.scenario,
                        seq.model if seq.model is not None else "",
                        seq.seed if seq.seed is not None else "",
                        "true" if node in seq.beyond_criterion else "false",
                    ]
                )

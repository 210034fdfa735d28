"""Centrality measures on pass networks.

Arc weights are pass frequencies, so shortest-path measures use the inverse
weight 1/w as arc distance: a frequent passing lane is a short hop.  All
three measures handle the disconnected digraphs that event splits produce.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import count
from statistics import pstdev

from .events import KeyEvent, KeyEventKind, MatchEventStream
from .passmap import (
    AugmentedPassmap,
    KeyEventSplit,
    Passmap,
    augment_with_shots,
    split_windows,
)

BETWEENNESS = "betweenness"
CLOSENESS = "closeness"
FLOW = "flow"
MEASURES = (BETWEENNESS, CLOSENESS, FLOW)


@dataclass(frozen=True)
class CentralityVector:
    scores: dict
    kind: str
    normalized: bool = True

    def __getitem__(self, node):
        return self.scores[node]

    def values(self):
        return list(self.scores.values())


@dataclass(frozen=True)
class DeltaStd:
    """Change in the spread of a centrality distribution across a split.

    Positive values denote a larger deviation after the split.  ``value`` is
    None when either half has no players to measure (the split is then not
    applicable and excluded from aggregates).
    """

    event_kind: KeyEventKind
    team_role: str  # "acting" | "opposing" | "na"
    measure: str
    std_before: float | None
    std_after: float | None

    @property
    def value(self) -> float | None:
        if self.std_before is None or self.std_after is None:
            return None
        return self.std_after - self.std_before

    @property
    def relative(self) -> float | None:
        if self.value is None or not self.std_before:
            return None
        return self.value / self.std_before


def _adjacency(g: Passmap) -> dict:
    adj = {node: [] for node in g.nodes}
    for (src, dst), w in g.arcs.items():
        adj[src].append((dst, 1.0 / w))
    return adj


def _sssp(adj: dict, source):
    """Dijkstra with shortest-path counting (the weighted Brandes kernel).

    Returns (settle order, predecessor lists, path counts, distances).
    """
    sigma = {v: 0.0 for v in adj}
    sigma[source] = 1.0
    preds: dict = {v: [] for v in adj}
    dist: dict = {}
    seen = {source: 0.0}
    order = []
    tie = count()
    heap = [(0.0, next(tie), None, source)]
    while heap:
        d, _, pred, v = heapq.heappop(heap)
        if v in dist:
            continue
        if pred is not None:
            sigma[v] += sigma[pred]
        dist[v] = d
        order.append(v)
        for w, step in adj[v]:
            nd = d + step
            if w not in dist and (w not in seen or nd < seen[w]):
                seen[w] = nd
                sigma[w] = 0.0
                preds[w] = [v]
                heapq.heappush(heap, (nd, next(tie), v, w))
            elif nd == seen.get(w):
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma, dist


def _raw_betweenness(g: Passmap) -> dict:
    adj = _adjacency(g)
    raw = {v: 0.0 for v in adj}
    for s in adj:
        order, preds, sigma, _ = _sssp(adj, s)
        delta = {v: 0.0 for v in order}
        while order:
            w = order.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                raw[w] += delta[w]
    return raw


def betweenness(g: Passmap) -> CentralityVector:
    """Shortest-path betweenness with fractional counting of ties.

    Normalized by (n-1)(n-2); graphs with fewer than 3 nodes have no
    intermediary pairs and yield the zero vector.
    """
    raw = _raw_betweenness(g)
    n = g.node_count
    if n < 3:
        return CentralityVector({v: 0.0 for v in g.nodes}, BETWEENNESS)
    scale = 1.0 / ((n - 1) * (n - 2))
    return CentralityVector({v: raw[v] * scale for v in g.nodes}, BETWEENNESS)


def closeness(g: Passmap) -> CentralityVector:
    """Harmonic closeness over outgoing inverse-frequency distances.

    Distances are rescaled per graph by the total arc weight (arc distance
    W / w >= 1, the lane's inverse share of all passes), which keeps scores
    in [0, 1], makes values invariant under uniform weight scaling, and puts
    halves of different lengths on a comparable footing.  Unreachable
    targets contribute nothing, so the measure stays finite on the
    disconnected digraphs splits produce; the sum is divided by (n-1).
    """
    adj = _adjacency(g)
    n = g.node_count
    w_total = sum(g.arcs.values()) if g.arcs else 1
    scores = {}
    for v in adj:
        if n < 2:
            scores[v] = 0.0
            continue
        _, _, _, dist = _sssp(adj, v)
        total = sum(1.0 / (d * w_total) for u, d in dist.items() if u != v)
        scores[v] = total / (n - 1)
    return CentralityVector(scores, CLOSENESS)


def flow_centrality(aug: AugmentedPassmap) -> CentralityVector:
    """Betweenness on the shot-augmented network, reported for players only.

    The synthetic SHOT_ON/SHOT_OFF sinks participate as shortest-path
    targets (routing credit toward shot involvement) but are skipped in the
    returned vector.
    """
    raw = _raw_betweenness(aug)
    n = aug.node_count
    players = aug.player_nodes
    if n < 3:
        return CentralityVector({v: 0.0 for v in players}, FLOW)
    scale = 1.0 / ((n - 1) * (n - 2))
    return CentralityVector({v: raw[v] * scale for v in players}, FLOW)


def centrality_vector(
    g: Passmap,
    measure: str,
    stream: MatchEventStream | None = None,
    window=None,
) -> CentralityVector:
    if measure == BETWEENNESS:
        return betweenness(g)
    if measure == CLOSENESS:
        return closeness(g)
    if measure == FLOW:
        if stream is None:
            raise ValueError("flow centrality needs the event stream to add shot sinks")
        aug = augment_with_shots(g, stream, g.team_id, window)
        return flow_centrality(aug)
    raise ValueError(f"unknown measure {measure!r}")


def team_role(event: KeyEvent, team_id: int) -> str:
    if event.kind is KeyEventKind.HALF_TIME or event.acting_team_id is None:
        return "na"
    return "acting" if event.acting_team_id == team_id else "opposing"


def delta_std(
    split: KeyEventSplit,
    measure: str,
    stream: MatchEventStream | None = None,
) -> DeltaStd:
    """Population-std change of a centrality measure across a split.

    Player populations are full team enumerations, hence population (not
    sample) standard deviation.  An empty half marks the record not
    applicable rather than producing a value.
    """
    before_w, after_w = split_windows(split.event)

    def half_std(g: Passmap, window) -> float | None:
        if g.node_count == 0:
            return None
        vec = centrality_vector(g, measure, stream=stream, window=window)
        vals = vec.values()
        return pstdev(vals) if vals else None

    return DeltaStd(
        event_kind=split.event.kind,
        team_role=team_role(split.event, split.team_id),
        measure=measure,
        std_before=half_std(split.before, before_w),
        std_after=half_std(split.after, after_w),
    )

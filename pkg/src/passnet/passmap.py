"""Directed weighted pass networks and their key-event splits.

Nodes are player ids, arc weights are pass counts.  Graphs are treated as
immutable once built; every operation returns a new instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import median

from .events import (
    CompletedPass,
    EventKind,
    KeyEvent,
    MatchEventStream,
    ShotOutcome,
    Window,
    WHOLE_MATCH,
    successful_passes,
)

NodeId = int | str

SHOT_ON = "SHOT_ON"
SHOT_OFF = "SHOT_OFF"

ON_TARGET = frozenset({ShotOutcome.GOAL, ShotOutcome.ON_TARGET_SAVED})
OFF_TARGET = frozenset({ShotOutcome.OFF_TARGET, ShotOutcome.BLOCKED, ShotOutcome.OTHER})

PLAYING_LINES = ("GK", "DEF", "MID", "ATT")


@dataclass(frozen=True)
class NodeInfo:
    name: str | None = None
    line: str | None = None  # one of PLAYING_LINES when known


@dataclass
class Passmap:
    """Directed graph of completed passes for one team and time window.

    ``nodes`` preserves first-appearance order (passer before recipient),
    which fixes the vertex numbering used by the Pajek exporter.  Isolated
    nodes are allowed only when injected explicitly (e.g. from lineups).
    """

    team_id: int | None = None
    label: str = ""
    nodes: dict[NodeId, NodeInfo] = field(default_factory=dict)
    arcs: dict[tuple[NodeId, NodeId], int] = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    @property
    def total_weight(self) -> int:
        return sum(self.arcs.values())

    def node_label(self, node: NodeId) -> str:
        info = self.nodes.get(node)
        if info is not None and info.name:
            return info.name
        return str(node)

    def weight(self, src: NodeId, dst: NodeId) -> int:
        return self.arcs.get((src, dst), 0)

    def out_degree(self, node: NodeId) -> int:
        return sum(1 for (s, _t) in self.arcs if s == node)

    def in_degree(self, node: NodeId) -> int:
        return sum(1 for (_s, t) in self.arcs if t == node)

    def successors(self, node: NodeId) -> list[NodeId]:
        return [t for (s, t) in self.arcs if s == node]

    def predecessors(self, node: NodeId) -> list[NodeId]:
        return [s for (s, t) in self.arcs if t == node]

    def with_node_info(self, info: dict[NodeId, NodeInfo]) -> "Passmap":
        """Copy with name/line metadata attached to matching nodes."""
        nodes = {n: info.get(n, meta) for n, meta in self.nodes.items()}
        return Passmap(self.team_id, self.label, nodes, dict(self.arcs))

    def add_isolated(self, node: NodeId, info: NodeInfo | None = None) -> None:
        self.nodes.setdefault(node, info or NodeInfo())


@dataclass
class AugmentedPassmap(Passmap):
    """Passmap plus two synthetic shot-sink nodes (zero out-degree)."""

    synthetic: frozenset[NodeId] = frozenset({SHOT_ON, SHOT_OFF})

    @property
    def player_nodes(self) -> list[NodeId]:
        return [n for n in self.nodes if n not in self.synthetic]


@dataclass
class KeyEventSplit:
    """(before, after) passmap pair for one team and one key event."""

    team_id: int
    event: KeyEvent
    before: Passmap
    after: Passmap


def split_windows(event: KeyEvent) -> tuple[Window, Window]:
    """Before/after windows induced by a key event.

    Passes at exactly the event timestamp fall in `after`.  For an event
    that never occurred, `before` spans the whole match and `after` is the
    empty window at the end of time.
    """
    tag = event.kind.value
    t = event.split_time()
    if t is None:
        return (
            Window(None, None, f"before_{tag}"),
            Window((10**6, 0.0), None, f"after_{tag}"),
        )
    return (Window(None, t, f"before_{tag}"), Window(t, None, f"after_{tag}"))


def build_passmap(
    passes: list[CompletedPass],
    team_id: int | None = None,
    label: str = "",
) -> Passmap:
    """Aggregate completed passes into a directed weighted graph."""
    g = Passmap(team_id=team_id, label=label)
    for p in passes:
        if p.passer_id == p.recipient_id:
            continue  # a pass event never has passer == recipient; enforce anyway
        g.nodes.setdefault(p.passer_id, NodeInfo())
        g.nodes.setdefault(p.recipient_id, NodeInfo())
        key = (p.passer_id, p.recipient_id)
        g.arcs[key] = g.arcs.get(key, 0) + 1
    return g


def build_match_passmap(
    stream: MatchEventStream, team_id: int, window: Window = WHOLE_MATCH, label: str = ""
) -> Passmap:
    passes = successful_passes(stream, team_id, window)
    return build_passmap(passes, team_id, label or window.label)


def split_on_event(
    stream: MatchEventStream, team_id: int, event: KeyEvent
) -> KeyEventSplit:
    """Split a team's passes into before/after networks around a key event.

    When the event never occurred the whole match lands in `before` and
    `after` is an empty graph, mirroring the empty after-event files the
    published network corpus uses.
    """
    before_w, after_w = split_windows(event)
    before = build_match_passmap(stream, team_id, before_w, before_w.label)
    if event.occurred:
        after = build_match_passmap(stream, team_id, after_w, after_w.label)
    else:
        after = Passmap(team_id=team_id, label=after_w.label)
    return KeyEventSplit(team_id=team_id, event=event, before=before, after=after)


def prune_median(g: Passmap) -> Passmap:
    """Drop arcs weighing no more than the graph's median arc weight.

    The median of an even-sized weight multiset is the mean of the two
    middle values; survivors therefore always satisfy w > median.  Nodes
    are kept, possibly isolated.  An arcless graph is returned unchanged.
    """
    if not g.arcs:
        return g
    cut = median(g.arcs.values())
    kept = {arc: w for arc, w in g.arcs.items() if w > cut}
    return Passmap(g.team_id, g.label, dict(g.nodes), kept)


def augment_with_shots(
    g: Passmap,
    stream: MatchEventStream,
    team_id: int,
    window: Window = WHOLE_MATCH,
) -> AugmentedPassmap:
    """Add SHOT_ON / SHOT_OFF sink nodes with shooter arcs weighted by count.

    On-target means goals and saved attempts; everything else (off target,
    blocked, other) counts as off-target.  With no shots in the window the
    synthetic nodes are present but isolated.
    """
    aug = AugmentedPassmap(team_id=team_id, label=g.label, nodes=dict(g.nodes), arcs=dict(g.arcs))
    aug.nodes.setdefault(SHOT_ON, NodeInfo(name=SHOT_ON))
    aug.nodes.setdefault(SHOT_OFF, NodeInfo(name=SHOT_OFF))
    for ev in stream.events:
        if ev.kind is not EventKind.SHOT or ev.team_id != team_id:
            continue
        if ev.period >= 5 or not window.contains(ev.period, ev.clock):
            continue
        if ev.player_id is None or ev.shot_detail is None:
            continue
        sink = SHOT_ON if ev.shot_detail.outcome in ON_TARGET else SHOT_OFF
        aug.nodes.setdefault(ev.player_id, NodeInfo())
        key = (ev.player_id, sink)
        aug.arcs[key] = aug.arcs.get(key, 0) + 1
    return aug

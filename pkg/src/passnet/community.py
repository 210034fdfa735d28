"""Community structure on pruned passmaps and comparison to playing lines.

Detection runs on the symmetrized graph (w_ij + w_ji merged into one
undirected weight) because the modularity being optimized is the standard
weighted undirected form; direction stays available to the other analyses.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations

from .passmap import PLAYING_LINES, Passmap

LEIDEN = "Leiden"
CLIQUE_PERCOLATION = "CliquePercolation"
PLAYING_LINES_METHOD = "PlayingLines"

_GAIN_EPS = 1e-12


class PartitionMismatchError(ValueError):
    """Raised when two partitions do not cover the same node set."""

    def __init__(self, only_p, only_q):
        self.only_p = sorted(only_p, key=str)
        self.only_q = sorted(only_q, key=str)
        super().__init__(
            f"partitions cover different node sets; only in first: {self.only_p}, "
            f"only in second: {self.only_q}"
        )


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to one community, indices contiguous from 0."""

    assignment: dict
    method: str

    @property
    def community_count(self) -> int:
        return len(set(self.assignment.values()))

    def members(self, index: int) -> list:
        return [n for n, c in self.assignment.items() if c == index]

    def communities(self) -> list[list]:
        out: dict[int, list] = {}
        for n, c in self.assignment.items():
            out.setdefault(c, []).append(n)
        return [out[i] for i in sorted(out)]


def _canonical_assignment(raw: dict, node_order) -> dict:
    relabel: dict[int, int] = {}
    assignment = {}
    for node in node_order:
        c = raw[node]
        if c not in relabel:
            relabel[c] = len(relabel)
        assignment[node] = relabel[c]
    return assignment


@dataclass(frozen=True)
class FormationGroundTruth:
    """Starting players grouped by playing line; the community ground truth."""

    team_id: int | None
    lines: dict[str, tuple]

    def __post_init__(self):
        seen = set()
        for line, players in self.lines.items():
            if line not in PLAYING_LINES:
                raise ValueError(f"unknown playing line {line!r}")
            for p in players:
                if p in seen:
                    raise ValueError(f"player {p} appears in two lines")
                seen.add(p)

    @property
    def players(self) -> set:
        return {p for players in self.lines.values() for p in players}

    def line_of(self, player) -> str | None:
        for line, players in self.lines.items():
            if player in players:
                return line
        return None

    def partition(self, granularity: int = 4) -> Partition:
        """Playing-lines partition; granularity 3 folds GK into the defence."""
        if granularity not in (3, 4):
            raise ValueError("granularity must be 3 or 4")
        raw = {}
        for line, players in self.lines.items():
            block = "DEF" if (granularity == 3 and line == "GK") else line
            for p in players:
                raw[p] = block
        order = sorted(raw, key=str)
        indices = {}
        assignment = {}
        for p in order:
            b = raw[p]
            if b not in indices:
                indices[b] = len(indices)
            assignment[p] = indices[b]
        return Partition(_canonical_assignment(assignment, order), PLAYING_LINES_METHOD)


def parse_formation_file(text: str) -> list[tuple[int, str, str]]:
    """Lines of `player_id,display_name,line`; comments with # allowed."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ValueError(f"formation line {lineno}: expected player_id,name,line")
        pid_text, name, role = parts
        if role not in PLAYING_LINES:
            raise ValueError(f"formation line {lineno}: unknown line {role!r}")
        try:
            pid = int(pid_text)
        except ValueError as exc:
            raise ValueError(f"formation line {lineno}: bad player id {pid_text!r}") from exc
        entries.append((pid, name, role))
    return entries


def formation_for_team(entries, team_players, team_id=None) -> FormationGroundTruth:
    lines: dict[str, list] = {line: [] for line in PLAYING_LINES}
    for pid, _name, role in entries:
        if pid in team_players:
            lines[role].append(pid)
    return FormationGroundTruth(team_id, {k: tuple(v) for k, v in lines.items() if v})


class _UndirectedView:
    """Symmetrized weighted view of a passmap, with community bookkeeping."""

    def __init__(self, g: Passmap):
        self.nodes = list(g.nodes)
        self.adj: dict = {n: {} for n in self.nodes}
        for (u, v), w in g.arcs.items():
            if u == v:
                continue
            self.adj[u][v] = self.adj[u].get(v, 0) + w
            self.adj[v][u] = self.adj[v].get(u, 0) + w
        self.strength = {n: sum(nbrs.values()) for n, nbrs in self.adj.items()}
        self.total = sum(self.strength.values()) / 2.0


def modularity(g: Passmap, partition: Partition | dict, resolution: float = 1.0) -> float:
    """Weighted undirected modularity of a partition, computed from scratch."""
    view = _UndirectedView(g)
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    if view.total == 0:
        return 0.0
    internal: dict[int, float] = {}
    strength_sum: dict[int, float] = {}
    for n in view.nodes:
        c = assignment[n]
        strength_sum[c] = strength_sum.get(c, 0.0) + view.strength[n]
    for u in view.nodes:
        cu = assignment[u]
        for v, w in view.adj[u].items():
            if assignment[v] == cu:
                internal[cu] = internal.get(cu, 0.0) + w
    q = 0.0
    two_w = 2.0 * view.total
    for c in strength_sum:
        q += internal.get(c, 0.0) / 2.0 / view.total
        q -= resolution * (strength_sum[c] / two_w) ** 2
    return q


class _LeidenState:
    def __init__(self, view: _UndirectedView, resolution: float):
        self.view = view
        self.resolution = resolution
        self.assignment = {n: i for i, n in enumerate(view.nodes)}
        self.strength_sum = {i: view.strength[n] for i, n in enumerate(view.nodes)}
        self.sizes = {i: 1 for i in range(len(view.nodes))}

    def _free_index(self) -> int:
        i = 0
        while i in self.sizes:
            i += 1
        return i

    def _cuts(self, block: list) -> dict[int, float]:
        """Total weight from the block to each community (block itself excluded)."""
        members = set(block)
        cuts: dict[int, float] = {}
        for u in block:
            for v, w in self.view.adj[u].items():
                if v in members:
                    continue
                cv = self.assignment[v]
                cuts[cv] = cuts.get(cv, 0.0) + w
        return cuts

    def gain(self, block: list, target: int, cuts: dict[int, float], k_block: float) -> float:
        """Modularity change of moving the whole block into `target`."""
        w = self.view.total
        source = self.assignment[block[0]]
        s_src = self.strength_sum.get(source, 0.0)
        s_dst = self.strength_sum.get(target, 0.0)
        edge_term = (cuts.get(target, 0.0) - cuts.get(source, 0.0)) / w
        null_term = self.resolution * k_block * (s_dst - s_src + k_block) / (2.0 * w * w)
        return edge_term - null_term

    def move(self, block: list, target: int) -> None:
        k_block = sum(self.view.strength[u] for u in block)
        source = self.assignment[block[0]]
        self.sizes[source] -= len(block)
        self.strength_sum[source] -= k_block
        if self.sizes[source] == 0:
            self.sizes.pop(source)
            self.strength_sum.pop(source)
        self.sizes[target] = self.sizes.get(target, 0) + len(block)
        self.strength_sum[target] = self.strength_sum.get(target, 0.0) + k_block
        for u in block:
            self.assignment[u] = target

    def best_target(self, block: list) -> tuple[int, float]:
        source = self.assignment[block[0]]
        k_block = sum(self.view.strength[u] for u in block)
        cuts = self._cuts(block)
        candidates = sorted(cuts)
        if source not in cuts:
            candidates.append(source)
        candidates.append(self._free_index())  # allow splitting off
        best_c, best_gain = source, 0.0
        for c in candidates:
            if c == source:
                continue
            g = self.gain(block, c, cuts, k_block)
            if g > best_gain + _GAIN_EPS:
                best_c, best_gain = c, g
        return best_c, best_gain

    def local_move(self, blocks: list[list], rng: random.Random) -> bool:
        """Queue-based move phase over the given block units; True if changed."""
        order = list(range(len(blocks)))
        rng.shuffle(order)
        queue = list(order)
        queued = set(order)
        changed = False
        while queue:
            bi = queue.pop(0)
            queued.discard(bi)
            block = blocks[bi]
            target, gain = self.best_target(block)
            if target == self.assignment[block[0]] or gain <= _GAIN_EPS:
                continue
            self.move(block, target)
            changed = True
            members = set(block)
            neighbours = {
                v for u in block for v in self.view.adj[u] if v not in members
            }
            for bj, other in enumerate(blocks):
                if bj in queued or bj == bi:
                    continue
                if any(u in neighbours for u in other):
                    queue.append(bj)
                    queued.add(bj)
        return changed

    def sweep_until_stable(self, rng: random.Random) -> None:
        """Full node passes until one pass makes no move.

        Unlike the queued phase this certifies, at termination, that no
        single-node move (to any community or a fresh one) improves
        modularity.
        """
        nodes = list(self.view.nodes)
        rng.shuffle(nodes)
        moved = True
        while moved:
            moved = False
            for u in nodes:
                target, gain = self.best_target([u])
                if target != self.assignment[u] and gain > _GAIN_EPS:
                    self.move([u], target)
                    moved = True


def leiden(g: Passmap, resolution: float = 1.0, seed: int = 0) -> Partition:
    """Leiden community detection: local moving, refinement, aggregation,
    iterated to stability, on symmetrized weights.

    Deterministic for a given (graph, resolution, seed).  Isolated nodes end
    up as singletons.  The returned partition is locally optimal: no single
    node move can increase modularity.
    """
    view = _UndirectedView(g)
    if not view.nodes:
        return Partition({}, LEIDEN)
    rng = random.Random(seed)
    state = _LeidenState(view, resolution)

    if view.total > 0:
        singletons = [[n] for n in view.nodes]
        state.local_move(singletons, rng)
        while True:
            blocks = _refine(state, rng)
            if not state.local_move(blocks, rng):
                break
        # final node-level sweeps: certify single-move local optimality
        state.sweep_until_stable(rng)

    return Partition(_canonical_assignment(state.assignment, view.nodes), LEIDEN)


def _refine(state: _LeidenState, rng: random.Random) -> list[list]:
    """Re-cluster each community from singletons, merging only inside it.

    Returns the refined blocks; the outer partition is left untouched (the
    refined blocks simply become the movable units of the next phase).
    """
    by_comm: dict[int, list] = {}
    for n, c in state.assignment.items():
        by_comm.setdefault(c, []).append(n)

    blocks: list[list] = []
    for c in sorted(by_comm):
        members = by_comm[c]
        if len(members) == 1:
            blocks.append(list(members))
            continue
        sub = {n: i for i, n in enumerate(members)}  # local refined ids
        member_set = set(members)
        order = list(members)
        rng.shuffle(order)
        improved = True
        while improved:
            improved = False
            for u in order:
                # candidate refined blocks: those of neighbours inside the community
                w = state.view.total
                k_u = state.view.strength[u]
                cuts: dict[int, float] = {}
                for v, wt in state.view.adj[u].items():
                    if v in member_set and sub[v] != sub[u]:
                        cuts[sub[v]] = cuts.get(sub[v], 0.0) + wt
                own_cut = sum(
                    wt
                    for v, wt in state.view.adj[u].items()
                    if v in member_set and sub[v] == sub[u]
                )
                k_sub = {b: 0.0 for b in set(sub.values())}
                for v in members:
                    k_sub[sub[v]] += state.view.strength[v]
                best_b, best_gain = sub[u], 0.0
                for b in sorted(cuts):
                    gain = (cuts[b] - own_cut) / w - state.resolution * k_u * (
                        k_sub[b] - k_sub[sub[u]] + k_u
                    ) / (2.0 * w * w)
                    if gain > best_gain + _GAIN_EPS:
                        best_b, best_gain = b, gain
                if best_b != sub[u]:
                    sub[u] = best_b
                    improved = True
        grouped: dict[int, list] = {}
        for n in members:
            grouped.setdefault(sub[n], []).append(n)
        blocks.extend(grouped[b] for b in sorted(grouped))
    return blocks


def find_k_cliques(g: Passmap, k: int) -> list[tuple]:
    """All k-cliques of the undirected support, as sorted node tuples."""
    view = _UndirectedView(g)
    index = {n: i for i, n in enumerate(view.nodes)}
    cliques = []
    for combo in combinations(view.nodes, k):
        if all(b in view.adj[a] for a, b in combinations(combo, 2)):
            cliques.append(tuple(sorted(combo, key=lambda n: index[n])))
    return cliques


def clique_percolation_cover(g: Passmap, k: int) -> list[set]:
    """k-clique percolation communities (possibly overlapping node sets).

    Two k-cliques are adjacent when they share k-1 nodes; communities are
    the node unions of the connected clique components.
    """
    if k not in (3, 4):
        raise ValueError("k must be 3 or 4")
    cliques = find_k_cliques(g, k)
    parent = list(range(len(cliques)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    sets = [set(c) for c in cliques]
    for i, j in combinations(range(len(cliques)), 2):
        if len(sets[i] & sets[j]) >= k - 1:
            union(i, j)

    grouped: dict[int, set] = {}
    for i in range(len(cliques)):
        grouped.setdefault(find(i), set()).update(sets[i])

    index = {n: i for i, n in enumerate(g.nodes)}
    covers = sorted(
        grouped.values(), key=lambda s: (min(index[n] for n in s), sorted(str(n) for n in s))
    )
    return covers


def clique_percolation(g: Passmap, k: int) -> Partition:
    """Flattened clique-percolation partition with singleton completion.

    Nodes covered by several communities go to the one with the highest
    total internal weight (symmetrized), ties to the lowest community index.
    """
    covers = clique_percolation_cover(g, k)
    view = _UndirectedView(g)

    def cover_weight(nodes: set) -> float:
        return sum(
            w for u in nodes for v, w in view.adj[u].items() if v in nodes
        ) / 2.0

    weights = [cover_weight(c) for c in covers]
    raw = {}
    for ci, nodes in enumerate(covers):
        for n in nodes:
            if n not in raw:
                raw[n] = ci
            else:
                held = raw[n]
                if weights[ci] > weights[held]:
                    raw[n] = ci
    next_index = len(covers)
    for n in g.nodes:
        if n not in raw:
            raw[n] = next_index
            next_index += 1
    return Partition(_canonical_assignment(raw, list(g.nodes)), CLIQUE_PERCOLATION)


def nmi(p: Partition, q: Partition) -> float:
    """Normalized mutual information with arithmetic-mean normalization.

    Degenerate conventions: two single-block partitions agree perfectly (1);
    if exactly one side carries no information the score is 0.
    """
    nodes_p, nodes_q = set(p.assignment), set(q.assignment)
    if nodes_p != nodes_q:
        raise PartitionMismatchError(nodes_p - nodes_q, nodes_q - nodes_p)
    n = len(nodes_p)
    if n == 0:
        return 1.0

    table: dict[tuple[int, int], int] = {}
    size_p: dict[int, int] = {}
    size_q: dict[int, int] = {}
    for node in nodes_p:
        a, b = p.assignment[node], q.assignment[node]
        table[(a, b)] = table.get((a, b), 0) + 1
        size_p[a] = size_p.get(a, 0) + 1
        size_q[b] = size_q.get(b, 0) + 1

    h_p = -sum((s / n) * math.log(s / n) for s in size_p.values() if s)
    h_q = -sum((s / n) * math.log(s / n) for s in size_q.values() if s)
    if h_p == 0.0 and h_q == 0.0:
        return 1.0
    if h_p == 0.0 or h_q == 0.0:
        return 0.0
    info = 0.0
    for (a, b), c in table.items():
        info += (c / n) * math.log(c * n / (size_p[a] * size_q[b]))
    return info / ((h_p + h_q) / 2.0)


@dataclass
class PositionProfile:
    """Community size x playing line occupancy counts, with proportions."""

    counts: dict = field(default_factory=dict)  # (size, line) -> member slots
    unknown_players: set = field(default_factory=set)

    LINES = PLAYING_LINES + ("UNK",)

    def add(self, size: int, line: str) -> None:
        key = (size, line)
        self.counts[key] = self.counts.get(key, 0) + 1

    def sizes(self) -> list[int]:
        return sorted({s for s, _ in self.counts})

    def row(self, size: int) -> dict[str, float]:
        total = sum(self.counts.get((size, line), 0) for line in self.LINES)
        if total == 0:
            return {line: 0.0 for line in self.LINES}
        return {line: self.counts.get((size, line), 0) / total for line in self.LINES}


def position_community_profile(
    partitions: list[Partition],
    ground_truths: list[FormationGroundTruth],
) -> PositionProfile:
    """Per community size, the share of member slots each playing line fills.

    Players missing from the ground truth count under the "UNK" line and are
    reported in ``unknown_players``.
    """
    if len(partitions) != len(ground_truths):
        raise ValueError("need one ground truth per partition")
    profile = PositionProfile()
    for part, truth in zip(partitions, ground_truths):
        for community in part.communities():
            size = len(community)
            for player in community:
                line = truth.line_of(player)
                if line is None:
                    profile.unknown_players.add(player)
                    line = "UNK"
                profile.add(size, line)
    return profile

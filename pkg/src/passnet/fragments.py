"""Directed graphlets of sizes 2 and 3, their orbits, and motif significance.

The atlas enumerates every digraph on 2 or 3 labelled nodes (no self-loops),
keeps the weakly connected ones, and deduplicates up to isomorphism: 2 dyads
plus 13 triads, 15 graphlets in all, carrying 33 automorphism orbits.
Counting is by induced subgraph: each connected pair and weakly connected
triple is classified once, under its full arc set.  Significance compares
observed counts to a degree-preserving null ensemble (directed configuration
models sampled by arc swaps) and normalizes the z-vector to unit length.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from statistics import mean, stdev

from .passmap import Passmap

MOTIF_COUNT = 15
ORBIT_COUNT = 33

_PAIR_ARCS = ((0, 1), (1, 0))
_TRIPLE_ARCS = ((0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1))

# Friendly shape names keyed by a representative arc set.
_NAMED_SHAPES: dict[str, tuple[int, frozenset]] = {
    "single arc": (2, frozenset({(0, 1)})),
    "mutual dyad": (2, frozenset({(0, 1), (1, 0)})),
    "out-star": (3, frozenset({(0, 1), (0, 2)})),
    "in-star": (3, frozenset({(1, 0), (2, 0)})),
    "path": (3, frozenset({(0, 1), (1, 2)})),
    "mutual with tail-out": (3, frozenset({(0, 1), (1, 0), (0, 2)})),
    "mutual with tail-in": (3, frozenset({(0, 1), (1, 0), (2, 0)})),
    "feed-forward": (3, frozenset({(0, 1), (0, 2), (1, 2)})),
    "three-cycle": (3, frozenset({(0, 1), (1, 2), (2, 0)})),
    "pivot": (3, frozenset({(0, 1), (1, 0), (1, 2), (2, 1)})),
    "mutual with joint source": (3, frozenset({(0, 1), (1, 0), (2, 0), (2, 1)})),
    "mutual with joint sink": (3, frozenset({(0, 1), (1, 0), (0, 2), (1, 2)})),
    "mutual in cycle": (3, frozenset({(0, 1), (1, 0), (1, 2), (2, 0)})),
    "near-complete": (3, frozenset({(0, 1), (1, 0), (0, 2), (2, 0), (1, 2)})),
    "complete mutual": (3, frozenset({(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)})),
}


def _arc_slots(size: int) -> tuple[tuple[int, int], ...]:
    return _PAIR_ARCS if size == 2 else _TRIPLE_ARCS


def _mask_from_arcs(arcs, size: int) -> int:
    slots = _arc_slots(size)
    mask = 0
    for i, arc in enumerate(slots):
        if arc in arcs:
            mask |= 1 << i
    return mask


def _arcs_from_mask(mask: int, size: int) -> frozenset:
    slots = _arc_slots(size)
    return frozenset(slots[i] for i in range(len(slots)) if mask & (1 << i))


def _permute_mask(mask: int, perm: tuple[int, ...], size: int) -> int:
    arcs = {(perm[a], perm[b]) for a, b in _arcs_from_mask(mask, size)}
    return _mask_from_arcs(arcs, size)


def _weakly_connected(mask: int, size: int) -> bool:
    if mask == 0:
        return False
    reach = {0}
    arcs = _arcs_from_mask(mask, size)
    frontier = True
    while frontier:
        frontier = False
        for a, b in arcs:
            if a in reach and b not in reach:
                reach.add(b)
                frontier = True
            elif b in reach and a not in reach:
                reach.add(a)
                frontier = True
    return len(reach) == size


def _canonical(mask: int, size: int) -> tuple[int, tuple[int, ...]]:
    """Minimal mask over node relabellings and the permutation achieving it."""
    best = None
    best_perm = None
    for perm in permutations(range(size)):
        m = _permute_mask(mask, perm, size)
        if best is None or m < best:
            best, best_perm = m, perm
    return best, best_perm


@dataclass(frozen=True)
class Graphlet:
    index: int
    size: int
    mask: int  # canonical adjacency bit-string
    name: str
    orbit_of_position: tuple[int, ...]  # position -> global orbit index

    @property
    def arcs(self) -> frozenset:
        return _arcs_from_mask(self.mask, self.size)

    @property
    def arc_count(self) -> int:
        return bin(self.mask).count("1")

    @property
    def orbits(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.orbit_of_position)))


class GraphletAtlas:
    """The 15 canonical directed graphlets and their 33 node orbits.

    Ordering is deterministic: graphlets sort by (node count, arc count,
    canonical adjacency bit-string); orbits are numbered in atlas order,
    then by canonical node position.
    """

    def __init__(self):
        canonical_masks: dict[int, list[int]] = {2: [], 3: []}
        for size in (2, 3):
            seen = set()
            for mask in range(1, 1 << len(_arc_slots(size))):
                if not _weakly_connected(mask, size):
                    continue
                canon, _ = _canonical(mask, size)
                if canon not in seen:
                    seen.add(canon)
                    canonical_masks[size].append(canon)

        ordered = sorted(
            ((size, bin(m).count("1"), m) for size in (2, 3) for m in canonical_masks[size])
        )

        names = {}
        for name, (size, arcs) in _NAMED_SHAPES.items():
            canon, _ = _canonical(_mask_from_arcs(arcs, size), size)
            names[(size, canon)] = name

        self.graphlets: list[Graphlet] = []
        next_orbit = 0
        for index, (size, _count, mask) in enumerate(ordered):
            autos = [
                perm
                for perm in permutations(range(size))
                if _permute_mask(mask, perm, size) == mask
            ]
            orbit_of_position = [-1] * size
            for pos in range(size):
                if orbit_of_position[pos] >= 0:
                    continue
                members = {perm[pos] for perm in autos}
                for m in members:
                    orbit_of_position[m] = next_orbit
                next_orbit += 1
            self.graphlets.append(
                Graphlet(
                    index=index,
                    size=size,
                    mask=mask,
                    name=names.get((size, mask), f"graphlet-{index}"),
                    orbit_of_position=tuple(orbit_of_position),
                )
            )
        self.orbit_count = next_orbit

        # mask -> (graphlet index, per-position global orbits); None entries
        # mark disconnected masks.
        self._pair_lookup = self._build_lookup(2)
        self._triple_lookup = self._build_lookup(3)
        self._by_name = {g.name: g.index for g in self.graphlets}
        self._by_key = {(g.size, g.mask): g.index for g in self.graphlets}

    def _build_lookup(self, size: int):
        table: list[tuple[int, tuple[int, ...]] | None] = []
        for mask in range(1 << len(_arc_slots(size))):
            if not _weakly_connected(mask, size):
                table.append(None)
                continue
            canon, perm = _canonical(mask, size)
            gi = self._index_of(size, canon)
            graphlet = self.graphlets[gi]
            orbits = tuple(graphlet.orbit_of_position[perm[pos]] for pos in range(size))
            table.append((gi, orbits))
        return table

    def _index_of(self, size: int, canonical_mask: int) -> int:
        for g in self.graphlets:
            if g.size == size and g.mask == canonical_mask:
                return g.index
        raise KeyError((size, canonical_mask))

    def index_of(self, name: str) -> int:
        return self._by_name[name]

    def classify_pair(self, mask: int):
        return self._pair_lookup[mask]

    def classify_triple(self, mask: int):
        return self._triple_lookup[mask]

    def table(self) -> list[dict]:
        return [
            {
                "index": g.index,
                "size": g.size,
                "arcs": sorted(g.arcs),
                "arc_count": g.arc_count,
                "orbits": list(g.orbits),
                "name": g.name,
            }
            for g in self.graphlets
        ]


@lru_cache(maxsize=1)
def build_atlas() -> GraphletAtlas:
    return GraphletAtlas()


@dataclass(frozen=True)
class MotifCounts:
    counts: tuple[int, ...]

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __iter__(self):
        return iter(self.counts)


@dataclass(frozen=True)
class OppProfile:
    """Orbit occurrences per player: orbit totals divided by the 11 on the pitch."""

    values: tuple[float, ...]


@dataclass(frozen=True)
class EnsembleStats:
    means: tuple[float, ...]
    stds: tuple[float, ...]
    size: int
    master_seed: int
    shortfall_samples: int = 0  # samples that ran out of legal swaps early


@dataclass(frozen=True)
class SignificanceProfile:
    sp: tuple[float, ...]
    z: tuple[float, ...]
    capped: tuple[int, ...] = ()  # motif indices where a zero-spread null was capped


def _count_arcs(nodes: list, arc_set: set, atlas: GraphletAtlas):
    counts = [0] * MOTIF_COUNT
    orbit_counts = {n: [0] * atlas.orbit_count for n in nodes}

    for u, v in combinations(nodes, 2):
        mask = ((u, v) in arc_set) | (((v, u) in arc_set) << 1)
        hit = atlas.classify_pair(mask)
        if hit is None:
            continue
        gi, orbits = hit
        counts[gi] += 1
        orbit_counts[u][orbits[0]] += 1
        orbit_counts[v][orbits[1]] += 1

    for triple in combinations(nodes, 3):
        mask = 0
        for i, (a, b) in enumerate(_TRIPLE_ARCS):
            if (triple[a], triple[b]) in arc_set:
                mask |= 1 << i
        hit = atlas.classify_triple(mask)
        if hit is None:
            continue
        gi, orbits = hit
        counts[gi] += 1
        for pos in range(3):
            orbit_counts[triple[pos]][orbits[pos]] += 1

    return MotifCounts(tuple(counts)), orbit_counts


def count_motifs_and_orbits(g: Passmap) -> tuple[MotifCounts, dict]:
    """Induced motif counts and per-player orbit tallies of the unweighted view.

    Every connected node pair and weakly connected triple contributes exactly
    one induced subgraph; each member node's orbit tally grows by the orbit
    it occupies there.
    """
    atlas = build_atlas()
    nodes = list(g.nodes)
    arc_set = {(s, t) for (s, t) in g.arcs if s != t}
    return _count_arcs(nodes, arc_set, atlas)


def opp_profile(orbit_counts: dict) -> OppProfile:
    """Column sums of the orbit table, divided by the constant 11.

    11 is the number of players a team fields; the convention holds even for
    post-dismissal networks.
    """
    totals = [0.0] * build_atlas().orbit_count
    for vector in orbit_counts.values():
        for i, c in enumerate(vector):
            totals[i] += c
    return OppProfile(tuple(t / 11.0 for t in totals))


def _child_seed(master_seed: int, index: int) -> int:
    return (master_seed * 2654435761 + index * 97531) % (2**63)


def _swap_randomize(arcs: list, rng: random.Random, target_swaps: int) -> tuple[set, bool]:
    """Degree-preserving double arc swaps; rejects self-loops and parallels.

    Returns the randomized arc set and whether the target number of accepted
    swaps was reached before the try budget ran out.
    """
    arcs = list(arcs)
    arc_set = set(arcs)
    m = len(arcs)
    if m < 2:
        return arc_set, False
    tries_budget = 50 * target_swaps + 100
    accepted = 0
    tries = 0
    while accepted < target_swaps and tries < tries_budget:
        tries += 1
        i = rng.randrange(m)
        j = rng.randrange(m)
        if i == j:
            continue
        a, b = arcs[i]
        c, d = arcs[j]
        if a == d or c == b:
            continue  # would create a self-loop
        if (a, d) in arc_set or (c, b) in arc_set:
            continue  # would create a parallel arc (covers shared endpoints)
        arc_set.discard((a, b))
        arc_set.discard((c, d))
        arc_set.add((a, d))
        arc_set.add((c, b))
        arcs[i] = (a, d)
        arcs[j] = (c, b)
        accepted += 1
    return arc_set, accepted >= target_swaps


def sample_configuration(
    g: Passmap, seed: int, swaps_per_arc: int = 10
) -> tuple[set, bool]:
    """One configuration-model sample: (arc set, whether swaps hit target)."""
    base_arcs = [(s, t) for (s, t) in g.arcs if s != t]
    rng = random.Random(seed)
    return _swap_randomize(base_arcs, rng, swaps_per_arc * len(base_arcs))


def configuration_ensemble(
    g: Passmap, size: int = 100, master_seed: int = 0, swaps_per_arc: int = 10
) -> EnsembleStats:
    """Motif-count statistics over directed configuration-model samples.

    Each sample rewires the graph with seeded double arc swaps, preserving
    every node's in- and out-degree exactly and keeping the digraph simple.
    Graphs admitting no legal swap (a single arc, say) yield an ensemble of
    identical copies with zero spread, flagged via ``shortfall_samples``.
    """
    if size < 2:
        raise ValueError("ensemble size must be at least 2")
    atlas = build_atlas()
    nodes = list(g.nodes)
    base_arcs = [(s, t) for (s, t) in g.arcs if s != t]
    target = swaps_per_arc * len(base_arcs)

    per_motif: list[list[int]] = [[] for _ in range(MOTIF_COUNT)]
    shortfall = 0
    for i in range(size):
        rng = random.Random(_child_seed(master_seed, i))
        arc_set, reached = _swap_randomize(base_arcs, rng, target)
        if not reached:
            shortfall += 1
        counts, _ = _count_arcs(nodes, arc_set, atlas)
        for k in range(MOTIF_COUNT):
            per_motif[k].append(counts[k])

    means = tuple(mean(vals) for vals in per_motif)
    stds = tuple(stdev(vals) for vals in per_motif)
    return EnsembleStats(
        means=means,
        stds=stds,
        size=size,
        master_seed=master_seed,
        shortfall_samples=shortfall,
    )


def significance_profile(
    counts: MotifCounts, ensemble: EnsembleStats, z_cap: float = 10.0
) -> SignificanceProfile:
    """Unit-length normalization of the motif z-score vector.

    A zero ensemble spread means every null sample agreed; the z-score is 0
    when the observation matches, otherwise clamped to +-z_cap (recorded in
    ``capped`` so downstream medians stay interpretable).
    """
    z = []
    capped = []
    for i in range(MOTIF_COUNT):
        n_i = counts[i]
        mu = ensemble.means[i]
        sd = ensemble.stds[i]
        if sd > 0:
            z.append((n_i - mu) / sd)
        elif n_i == mu:
            z.append(0.0)
        else:
            z.append(z_cap if n_i > mu else -z_cap)
            capped.append(i)
    norm = math.sqrt(sum(v * v for v in z))
    if norm == 0.0:
        sp = tuple(0.0 for _ in z)
    else:
        sp = tuple(v / norm for v in z)
    return SignificanceProfile(sp=sp, z=tuple(z), capped=tuple(capped))

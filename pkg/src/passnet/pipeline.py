"""Corpus orchestration: batch parsing, network persistence, analysis fan-out,
aggregation, and report emission.

Everything is deterministic given (manifest, seed): iteration orders are
fixed, randomized steps derive their seeds from the manifest seed, floats are
formatted stably, and the run log carries no timestamps.  One corrupt match
file never aborts a run; it is skipped with a logged reason.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import mean, median, quantiles

from . import centrality as centrality_mod
from . import pajek
from .community import (
    CLIQUE_PERCOLATION,
    LEIDEN,
    PartitionMismatchError,
    Partition,
    clique_percolation,
    formation_for_team,
    leiden,
    nmi,
    parse_formation_file,
    position_community_profile,
)
from .events import (
    MatchEventStream,
    PassDiagnostics,
    Window,
    WHOLE_MATCH,
    detect_key_events,
    parse_match,
    possession_time,
    successful_passes,
)
from .fragments import (
    MOTIF_COUNT,
    ORBIT_COUNT,
    configuration_ensemble,
    count_motifs_and_orbits,
    opp_profile,
    significance_profile,
)
from .intensity import intensity
from .passmap import (
    NodeInfo,
    Passmap,
    augment_with_shots,
    build_match_passmap,
    prune_median,
    split_on_event,
    split_windows,
)

DATA_ROOT_ENV = "PASSNET_DATA_ROOT"
ANALYSES = ("centrality", "intensity", "community", "fragments")
MEASURES = ("betweenness", "closeness", "flow")


@dataclass(frozen=True)
class ManifestEntry:
    match_id: int | str
    events_path: Path
    formation_path: Path | None = None


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry]
    out_root: Path
    seed: int = 0
    ensemble_size: int = 100
    resolution: float = 1.0
    fragments_sample: int = 32
    analyses: tuple[str, ...] = ANALYSES
    workers: int = 1

    def __post_init__(self):
        ids = [e.match_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("manifest match_ids must be unique")


def _resolve(path_text: str, base: Path, data_root: Path | None) -> Path:
    p = Path(path_text)
    if p.is_absolute():
        return p
    candidate = base / p
    if candidate.exists() or data_root is None:
        return candidate
    fallback = data_root / p
    return fallback if fallback.exists() else candidate


def load_manifest(
    path: str | Path, out_root: str | Path | None = None, data_root: str | Path | None = None
) -> CorpusManifest:
    """Read a JSON or CSV manifest.

    Relative file paths resolve against the manifest directory, then against
    ``data_root`` (or $PASSNET_DATA_ROOT) as a fallback.  Referenced event
    files must exist at load time.
    """
    path = Path(path)
    base = path.parent
    if data_root is None and os.environ.get(DATA_ROOT_ENV):
        data_root = Path(os.environ[DATA_ROOT_ENV])
    elif data_root is not None:
        data_root = Path(data_root)

    settings: dict = {}
    rows: list[dict] = []
    if path.suffix.lower() == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        rows = payload.get("matches", [])
        settings = {k: v for k, v in payload.items() if k != "matches"}
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                rows.append(row)

    entries = []
    for row in rows:
        formation = row.get("formation") or None
        entries.append(
            ManifestEntry(
                match_id=row["match_id"],
                events_path=_resolve(str(row["events"]), base, data_root),
                formation_path=_resolve(str(formation), base, data_root) if formation else None,
            )
        )
    missing = [str(e.events_path) for e in entries if not e.events_path.exists()]
    if missing:
        raise FileNotFoundError(f"manifest references missing event files: {missing[:5]}")

    manifest = CorpusManifest(
        entries=entries,
        out_root=Path(out_root) if out_root else Path(settings.get("out", "out")),
    )
    if "seed" in settings:
        manifest.seed = int(settings["seed"])
    for key in ("ensemble_size", "resolution", "fragments_sample", "workers"):
        if key in settings:
            setattr(manifest, key, type(getattr(manifest, key))(settings[key]))
    return manifest


class RunLog:
    """Deterministic run log: config echo, then sorted event lines."""

    def __init__(self):
        self.config: list[str] = []
        self.lines: list[str] = []

    def config_line(self, text: str) -> None:
        self.config.append(text)

    def skip(self, match_id, stage: str, reason: str) -> None:
        self.lines.append(f"SKIP match={match_id} stage={stage} reason={reason}")

    def note(self, text: str) -> None:
        self.lines.append(f"NOTE {text}")

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.config:
                fh.write(f"CONFIG {line}\n")
            for line in sorted(self.lines):
                fh.write(line + "\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _load_stream(entry: ManifestEntry) -> MatchEventStream:
    return parse_match(entry.events_path.read_bytes(), match_id=entry.match_id)


def _node_info_map(stream: MatchEventStream, entry: ManifestEntry) -> dict:
    info: dict = {}
    for pid, name in stream.player_names.items():
        info[pid] = NodeInfo(name=name)
    if entry.formation_path is not None and entry.formation_path.exists():
        for pid, name, line in parse_formation_file(
            entry.formation_path.read_text(encoding="utf-8")
        ):
            info[pid] = NodeInfo(name=name or (info.get(pid).name if pid in info else None), line=line)
    return info


# ---------------------------------------------------------------------------
# networks


def run_networks(manifest: CorpusManifest) -> dict:
    """Persist the 12 per-match player networks plus shot-augmented variants.

    Layout: networks/<match_id>/<team_id>/<event>/<before|after>.net with a
    JSON sidecar per file; augmented variants carry a _flow suffix.  Matches
    that fail to parse are skipped and logged; the run continues.
    """
    log = RunLog()
    log.config_line(f"command=networks seed={manifest.seed} matches={len(manifest.entries)}")
    root = manifest.out_root / "networks"
    written = 0
    player_files = 0
    for entry in manifest.entries:
        try:
            stream = _load_stream(entry)
        except Exception as exc:
            log.skip(entry.match_id, "parse", str(exc))
            continue
        info = _node_info_map(stream, entry)
        key_events = detect_key_events(stream)
        for team_id in stream.team_ids:
            for event in key_events:
                split = split_on_event(stream, team_id, event)
                before_w, after_w = split_windows(event)
                event_dir = root / str(entry.match_id) / str(team_id) / event.kind.value
                event_dir.mkdir(parents=True, exist_ok=True)
                halves = (
                    ("before", split.before, before_w),
                    ("after", split.after, after_w),
                )
                for phase, graph, window in halves:
                    graph = graph.with_node_info(info)
                    net_path = event_dir / f"{phase}.net"
                    pajek.export_pajek(graph, net_path)
                    pajek.write_sidecar(
                        graph,
                        event_dir / f"{phase}.json",
                        match_id=entry.match_id,
                        event=event.kind.value,
                        phase=phase,
                        occurred=event.occurred,
                        window={"start": window.start, "end": window.end},
                    )
                    player_files += 1
                    written += 1
                    aug = augment_with_shots(graph, stream, team_id, window)
                    aug_path = event_dir / f"{phase}_flow.net"
                    pajek.export_pajek(aug, aug_path)
                    pajek.write_sidecar(
                        aug,
                        event_dir / f"{phase}_flow.json",
                        match_id=entry.match_id,
                        event=event.kind.value,
                        phase=phase,
                        occurred=event.occurred,
                        augmented=True,
                        window={"start": window.start, "end": window.end},
                    )
                    written += 1
    log.note(f"player_network_files={player_files} total_network_files={written}")
    log.write(manifest.out_root / "networks_run.log")
    return {"player_network_files": player_files, "total_network_files": written}


# ---------------------------------------------------------------------------
# per-match analysis


def _analyze_match(entry: ManifestEntry, manifest: CorpusManifest, with_fragments: bool) -> dict:
    """All requested analyses for one match; pure function of its inputs."""
    stream = _load_stream(entry)
    info = _node_info_map(stream, entry)
    key_events = detect_key_events(stream)
    out: dict = {
        "match_id": entry.match_id,
        "centrality": [],
        "intensity_splits": [],
        "intensity_match": [],
        "communities": [],
        "community_counts": [],
        "nmi": [],
        "profiles": [],  # (partition, ground truth) pairs for position profiling
        "significance": [],
        "zscores": [],
        "opp": [],
        "notes": [],
    }
    analyses = manifest.analyses

    formation_entries = None
    if entry.formation_path is not None and entry.formation_path.exists():
        formation_entries = parse_formation_file(
            entry.formation_path.read_text(encoding="utf-8")
        )

    for team_id in stream.team_ids:
        team_passes = successful_passes(stream, team_id)
        team_players = {p.passer_id for p in team_passes} | {
            p.recipient_id for p in team_passes
        }
        truth = None
        if formation_entries is not None:
            truth = formation_for_team(formation_entries, team_players, team_id)

        whole = build_match_passmap(stream, team_id, WHOLE_MATCH, "match").with_node_info(info)

        if "intensity" in analyses:
            t_match = possession_time(stream, team_id, WHOLE_MATCH)
            rec = intensity(whole, t_match)
            out["intensity_match"].append(
                [entry.match_id, team_id, rec.possession_seconds, rec.total_weight, rec.intensity]
            )

        windows_graphs: list[tuple[str, Passmap, Window]] = [("match", whole, WHOLE_MATCH)]

        for event in key_events:
            split = split_on_event(stream, team_id, event)
            before_w, after_w = split_windows(event)
            role = centrality_mod.team_role(event, team_id)
            windows_graphs.append((before_w.label, split.before.with_node_info(info), before_w))
            windows_graphs.append((after_w.label, split.after.with_node_info(info), after_w))

            if "centrality" in analyses:
                for measure in MEASURES:
                    d = centrality_mod.delta_std(split, measure, stream=stream)
                    out["centrality"].append(
                        [
                            entry.match_id,
                            team_id,
                            event.kind.value,
                            role,
                            measure,
                            d.std_before,
                            d.std_after,
                            d.value,
                            d.relative,
                        ]
                    )

            if "intensity" in analyses:
                t_before = possession_time(stream, team_id, before_w)
                t_after = possession_time(stream, team_id, after_w) if event.occurred else 0.0
                rec_b = intensity(split.before, t_before)
                rec_a = intensity(split.after, t_after)
                i_b, i_a = rec_b.intensity, rec_a.intensity
                delta = (i_a - i_b) if (i_a is not None and i_b is not None) else None
                rel = (delta / i_b) if (delta is not None and i_b) else None
                if event.occurred and (i_b is None or i_a is None):
                    out["notes"].append(
                        f"intensity not applicable match={entry.match_id} team={team_id} "
                        f"event={event.kind.value} reason=zero-possession-window"
                    )
                out["centrality"].append(
                    [
                        entry.match_id,
                        team_id,
                        event.kind.value,
                        role,
                        "intensity",
                        i_b,
                        i_a,
                        delta,
                        rel,
                    ]
                )

        if "community" in analyses or with_fragments:
            for label, graph, _w in windows_graphs:
                pruned = prune_median(graph)
                if "community" in analyses:
                    part = None
                    if graph.node_count:
                        part = community_partition(pruned, manifest.resolution, manifest.seed)
                        for node in part.assignment:
                            out["communities"].append(
                                [entry.match_id, team_id, label, LEIDEN, node, part.assignment[node]]
                            )
                        out["community_counts"].append(
                            [
                                entry.match_id,
                                team_id,
                                label,
                                LEIDEN,
                                part.community_count,
                                graph.node_count,
                            ]
                        )
                    if label == "match" and graph.node_count:
                        cp = clique_percolation(pruned, k=3)
                        for node in cp.assignment:
                            out["communities"].append(
                                [
                                    entry.match_id,
                                    team_id,
                                    label,
                                    CLIQUE_PERCOLATION,
                                    node,
                                    cp.assignment[node],
                                ]
                            )
                        out["community_counts"].append(
                            [
                                entry.match_id,
                                team_id,
                                label,
                                CLIQUE_PERCOLATION,
                                cp.community_count,
                                graph.node_count,
                            ]
                        )
                    if part is not None and truth is not None and truth.players:
                        for granularity in (3, 4):
                            baseline = truth.partition(granularity)
                            common = set(part.assignment) & set(baseline.assignment)
                            if len(common) < 2:
                                continue
                            p_r = Partition(
                                {n: part.assignment[n] for n in sorted(common, key=str)},
                                part.method,
                            )
                            q_r = Partition(
                                {n: baseline.assignment[n] for n in sorted(common, key=str)},
                                baseline.method,
                            )
                            try:
                                score = nmi(p_r, q_r)
                            except PartitionMismatchError:
                                continue
                            out["nmi"].append(
                                [
                                    entry.match_id,
                                    team_id,
                                    label,
                                    LEIDEN,
                                    granularity,
                                    score,
                                    len(common),
                                ]
                            )
                        if label == "match":
                            out["profiles"].append((part, truth))

                if with_fragments:
                    if pruned.arc_count == 0:
                        if graph.arc_count:
                            out["notes"].append(
                                f"fragments skipped match={entry.match_id} team={team_id} "
                                f"window={label} reason=pruned-to-empty"
                            )
                        continue
                    counts, orbit_counts = count_motifs_and_orbits(pruned)
                    ens = configuration_ensemble(
                        pruned, size=manifest.ensemble_size, master_seed=manifest.seed
                    )
                    prof = significance_profile(counts, ens)
                    opp = opp_profile(orbit_counts)
                    base = [entry.match_id, team_id, label]
                    out["significance"].append(base + list(prof.sp))
                    out["zscores"].append(
                        base
                        + list(prof.z)
                        + [
                            ";".join(str(i) for i in prof.capped),
                            pruned.arc_count,
                            ens.shortfall_samples,
                        ]
                    )
                    out["opp"].append(base + list(opp.values))
    return out


def community_partition(pruned: Passmap, resolution: float, seed: int) -> Partition:
    return leiden(pruned, resolution=resolution, seed=seed)


def run_analysis(manifest: CorpusManifest, which: tuple[str, ...] | None = None) -> dict:
    """Per-network analysis records plus corpus aggregation, written as CSVs.

    Fragments run on the first ``fragments_sample`` manifest entries (0 means
    every match); all other analyses cover the whole manifest.  Per-match
    failures are isolated: the match is skipped with a logged reason and the
    aggregate notes the reduced count.
    """
    manifest = replace(manifest, analyses=tuple(which) if which else manifest.analyses)
    log = RunLog()
    log.config_line(
        "command=analyze "
        f"seed={manifest.seed} ensemble_size={manifest.ensemble_size} "
        f"resolution={_fmt(manifest.resolution)} fragments_sample={manifest.fragments_sample} "
        f"analyses={','.join(manifest.analyses)} matches={len(manifest.entries)}"
    )
    sample_n = manifest.fragments_sample if manifest.fragments_sample > 0 else len(manifest.entries)
    fragment_ids = {e.match_id for e in manifest.entries[:sample_n]}

    results: list[dict] = []
    jobs = [
        (entry, "fragments" in manifest.analyses and entry.match_id in fragment_ids)
        for entry in manifest.entries
    ]
    if manifest.workers > 1:
        with ProcessPoolExecutor(max_workers=manifest.workers) as pool:
            futures = [
                pool.submit(_analyze_match, entry, manifest, frag) for entry, frag in jobs
            ]
            for (entry, _frag), future in zip(jobs, futures):
                try:
                    results.append(future.result())
                except Exception as exc:
                    log.skip(entry.match_id, "analyze", str(exc))
    else:
        for entry, frag in jobs:
            try:
                results.append(_analyze_match(entry, manifest, frag))
            except Exception as exc:
                log.skip(entry.match_id, "analyze", str(exc))

    results.sort(key=lambda r: str(r["match_id"]))
    res_dir = manifest.out_root / "results"

    centrality_rows = [row for r in results for row in r["centrality"]]
    _write_csv(
        res_dir / "centrality.csv",
        [
            "match_id",
            "team_id",
            "event_kind",
            "team_role",
            "measure",
            "std_before",
            "std_after",
            "delta",
            "relative_delta",
        ],
        centrality_rows,
    )
    _write_csv(
        res_dir / "intensity_match.csv",
        ["match_id", "team_id", "possession_seconds", "total_passes", "intensity"],
        [row for r in results for row in r["intensity_match"]],
    )
    _write_csv(
        res_dir / "communities.csv",
        ["match_id", "team_id", "window", "method", "player_id", "community"],
        [row for r in results for row in r["communities"]],
    )
    _write_csv(
        res_dir / "community_counts.csv",
        ["match_id", "team_id", "window", "method", "community_count", "node_count"],
        [row for r in results for row in r["community_counts"]],
    )
    _write_csv(
        res_dir / "nmi.csv",
        ["match_id", "team_id", "window", "method", "granularity", "nmi", "common_nodes"],
        [row for r in results for row in r["nmi"]],
    )

    profile_pairs = [pair for r in results for pair in r["profiles"]]
    if profile_pairs:
        profile = position_community_profile(
            [p for p, _t in profile_pairs], [t for _p, t in profile_pairs]
        )
        rows = []
        for size in profile.sizes():
            row = profile.row(size)
            for line in profile.LINES:
                rows.append([size, line, row[line], profile.counts.get((size, line), 0)])
        _write_csv(
            res_dir / "position_profile.csv",
            ["community_size", "line", "proportion", "count"],
            rows,
        )

    sp_header = ["match_id", "team_id", "window"] + [f"sp_{i}" for i in range(MOTIF_COUNT)]
    _write_csv(
        res_dir / "significance.csv",
        sp_header,
        [row for r in results for row in r["significance"]],
    )
    z_header = (
        ["match_id", "team_id", "window"]
        + [f"z_{i}" for i in range(MOTIF_COUNT)]
        + ["capped", "arc_count", "shortfall_samples"]
    )
    _write_csv(res_dir / "zscores.csv", z_header, [row for r in results for row in r["zscores"]])
    opp_header = ["match_id", "team_id", "window"] + [f"opp_{i}" for i in range(ORBIT_COUNT)]
    _write_csv(res_dir / "opp.csv", opp_header, [row for r in results for row in r["opp"]])

    for r in results:
        for note in r["notes"]:
            log.note(note)

    report = aggregate_report(centrality_rows, analyzed=len(results), manifest_size=len(manifest.entries))
    _write_csv(
        res_dir / "aggregate.csv",
        ["event_kind", "team_role", "measure", "count", "na_count", "mean", "median", "q1", "q3"],
        report.rows,
    )
    log.note(f"matches_analyzed={len(results)} of {len(manifest.entries)}")
    log.write(manifest.out_root / "analyze_run.log")
    return {
        "results": results,
        "aggregate": report,
        "analyzed": len(results),
        "out": str(res_dir),
    }


@dataclass
class AggregateReport:
    """Distribution summaries of split deltas per (event kind, role, measure)."""

    rows: list[list] = field(default_factory=list)
    analyzed: int = 0
    manifest_size: int = 0

    def lookup(self, event_kind: str, team_role: str, measure: str) -> dict | None:
        for row in self.rows:
            if row[0] == event_kind and row[1] == team_role and row[2] == measure:
                return {
                    "count": row[3],
                    "na_count": row[4],
                    "mean": row[5],
                    "median": row[6],
                    "q1": row[7],
                    "q3": row[8],
                }
        return None


def aggregate_report(centrality_rows: list[list], analyzed: int = 0, manifest_size: int = 0) -> AggregateReport:
    """Order-independent aggregation of delta records."""
    groups: dict[tuple[str, str, str], list] = {}
    for row in centrality_rows:
        _mid, _tid, event_kind, role, measure, _b, _a, delta, _rel = row
        groups.setdefault((event_kind, role, measure), []).append(delta)
    rows = []
    for key in sorted(groups):
        deltas = groups[key]
        values = sorted(d for d in deltas if d is not None)
        na = len(deltas) - len(values)
        if values:
            m = mean(values)
            med = median(values)
            if len(values) >= 2:
                q = quantiles(values, n=4)
                q1, q3 = q[0], q[2]
            else:
                q1 = q3 = values[0]
        else:
            m = med = q1 = q3 = None
        rows.append([key[0], key[1], key[2], len(values), na, m, med, q1, q3])
    return AggregateReport(rows=rows, analyzed=analyzed, manifest_size=manifest_size)

"""Command line interface.

Subcommands: simulate, ingest, networks, analyze, aggregate, plot.  Relative
paths in a manifest resolve against the manifest directory, falling back to
$PASSNET_DATA_ROOT.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .events import PassDiagnostics, detect_key_events, parse_match, successful_passes
from .pipeline import (
    ANALYSES,
    AggregateReport,
    CorpusManifest,
    aggregate_report,
    load_manifest,
    run_analysis,
    run_networks,
    _write_csv,
)
from .synthetic import write_corpus


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--matches", required=True, help="manifest file (JSON or CSV)")
    parser.add_argument("--out", default=None, help="output root directory")
    parser.add_argument("--data-root", default=None, help="fallback root for relative paths")
    parser.add_argument("--seed", type=int, default=None)


def _manifest_from_args(args) -> CorpusManifest:
    manifest = load_manifest(args.matches, out_root=args.out, data_root=args.data_root)
    if args.seed is not None:
        manifest.seed = args.seed
    for attr in ("ensemble_size", "resolution", "fragments_sample", "workers"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(manifest, attr, value)
    return manifest


def _cmd_simulate(args) -> int:
    manifest = write_corpus(args.out, matches=args.n, seed=args.seed)
    print(f"wrote {args.n} synthetic matches; manifest at {manifest}")
    return 0


def _cmd_ingest(args) -> int:
    manifest = _manifest_from_args(args)
    rows = []
    failures = 0
    for entry in manifest.entries:
        try:
            stream = parse_match(entry.events_path.read_bytes(), match_id=entry.match_id)
        except Exception as exc:
            print(f"SKIP {entry.match_id}: {exc}", file=sys.stderr)
            failures += 1
            continue
        key = {e.kind.value: e for e in detect_key_events(stream)}
        diagnostics = PassDiagnostics()
        pass_counts = {
            team: len(successful_passes(stream, team, diagnostics=diagnostics))
            for team in stream.team_ids
        }
        rows.append(
            [
                entry.match_id,
                stream.home_team_id,
                stream.away_team_id,
                len(stream.events),
                pass_counts[stream.home_team_id],
                pass_counts[stream.away_team_id],
                key["first_goal"].occurred,
                key["first_dismissal"].occurred,
                diagnostics.missing_recipient,
            ]
        )
    out = Path(manifest.out_root)
    _write_csv(
        out / "ingest.csv",
        [
            "match_id",
            "home_team_id",
            "away_team_id",
            "events",
            "home_passes",
            "away_passes",
            "has_first_goal",
            "has_first_dismissal",
            "passes_missing_recipient",
        ],
        rows,
    )
    print(f"ingested {len(rows)} matches ({failures} skipped); table at {out / 'ingest.csv'}")
    return 0 if failures == 0 else 1


def _cmd_networks(args) -> int:
    manifest = _manifest_from_args(args)
    summary = run_networks(manifest)
    print(
        f"wrote {summary['player_network_files']} player networks "
        f"({summary['total_network_files']} files with augmented variants) "
        f"under {manifest.out_root / 'networks'}"
    )
    return 0


def _cmd_analyze(args) -> int:
    manifest = _manifest_from_args(args)
    which = tuple(args.which.split(",")) if args.which else None
    if which:
        unknown = set(which) - set(ANALYSES)
        if unknown:
            print(f"unknown analyses: {sorted(unknown)}", file=sys.stderr)
            return 2
    summary = run_analysis(manifest, which=which)
    print(f"analyzed {summary['analyzed']} matches; tables under {summary['out']}")
    return 0


def _cmd_aggregate(args) -> int:
    res = Path(args.out) / "results"
    cent = res / "centrality.csv"
    if not cent.exists():
        print(f"no centrality table at {cent}; run analyze first", file=sys.stderr)
        return 2
    with open(cent, newline="", encoding="utf-8") as fh:
        rows = []
        for r in csv.DictReader(fh):
            rows.append(
                [
                    r["match_id"],
                    r["team_id"],
                    r["event_kind"],
                    r["team_role"],
                    r["measure"],
                    None,
                    None,
                    float(r["delta"]) if r["delta"] else None,
                    None,
                ]
            )
    report: AggregateReport = aggregate_report(rows)
    _write_csv(
        res / "aggregate.csv",
        ["event_kind", "team_role", "measure", "count", "na_count", "mean", "median", "q1", "q3"],
        report.rows,
    )
    print(f"aggregated {len(rows)} delta records into {res / 'aggregate.csv'}")
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plots

    made = emit_plots(args.out)
    print(f"rendered {len(made)} figures under {Path(args.out) / 'plots'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="passnet",
        description="Pass-network analytics: key-event splits, centrality, "
        "communities, and graphlet significance profiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic demo corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=8, help="number of matches")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("ingest", help="parse matches and write a summary table")
    _add_common(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("networks", help="write before/after Pajek networks")
    _add_common(p)
    p.set_defaults(func=_cmd_networks)

    p = sub.add_parser("analyze", help="run analyses and write result tables")
    _add_common(p)
    p.add_argument("--ensemble-size", type=int, default=None, dest="ensemble_size")
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument(
        "--fragments-sample",
        type=int,
        default=None,
        dest="fragments_sample",
        help="matches to run fragment analysis on (0 = all)",
    )
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--which", default=None, help="comma list of: " + ",".join(ANALYSES))
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("aggregate", help="re-aggregate result tables")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("plot", help="render SVG figures from result tables")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

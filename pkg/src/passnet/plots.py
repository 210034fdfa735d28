"""SVG report figures: profile overlays and delta histograms.

Rendered with matplotlib's SVG backend under a fixed hash salt and with the
date metadata stripped, so regenerating a plot from identical data yields a
byte-identical file.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

from .fragments import MOTIF_COUNT, ORBIT_COUNT  # noqa: E402

_BEFORE_STYLE = {"color": "#1f77b4", "marker": "o", "linewidth": 1.4, "markersize": 4}
_AFTER_STYLE = {"color": "#d62728", "marker": "s", "linewidth": 1.4, "markersize": 4}


def _new_figure(width: float = 7.2, height: float = 3.6):
    plt.rcParams["svg.hashsalt"] = "passnet"
    return plt.subplots(figsize=(width, height))


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_opp_pair(
    before: list[float], after: list[float], path: str | Path, title: str
) -> None:
    fig, ax = _new_figure()
    ax.plot(range(ORBIT_COUNT), before, label="before", **_BEFORE_STYLE)
    ax.plot(range(ORBIT_COUNT), after, label="after", **_AFTER_STYLE)
    ax.set_title(title)
    ax.set_xlabel("orbit index")
    ax.set_ylabel("occurrences per player")
    ax.set_xticks(range(0, ORBIT_COUNT, 2))
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    _save(fig, Path(path))


def plot_significance_pair(
    before: list[float], after: list[float], path: str | Path, title: str
) -> None:
    fig, ax = _new_figure()
    ax.plot(range(MOTIF_COUNT), before, label="before", **_BEFORE_STYLE)
    ax.plot(range(MOTIF_COUNT), after, label="after", **_AFTER_STYLE)
    ax.set_ylim(-1.05, 1.05)
    ax.axhline(0.0, color="#888888", linewidth=0.8)
    ax.set_title(title)
    ax.set_xlabel("motif index")
    ax.set_ylabel("significance profile")
    ax.set_xticks(range(MOTIF_COUNT))
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    _save(fig, Path(path))


def plot_delta_histogram(values: list[float], path: str | Path, title: str, x_label: str) -> None:
    fig, ax = _new_figure(6.0, 3.4)
    if values:
        ax.hist(values, bins=21, color="#1f77b4", edgecolor="white")
    ax.axvline(0.0, color="#d62728", linewidth=1.0)
    ax.set_title(title)
    ax.set_xlabel(x_label)
    ax.set_ylabel("networks")
    fig.tight_layout()
    _save(fig, Path(path))


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def emit_plots(out_root: str | Path) -> list[Path]:
    """Render every report figure from the result tables under ``out_root``.

    Produces one OPP overlay and one significance overlay per network pair
    (before/after of each match, team, and key event) and one histogram per
    (measure, event kind) of the split deltas.
    """
    out_root = Path(out_root)
    res = out_root / "results"
    plots = out_root / "plots"
    made: list[Path] = []

    opp_path = res / "opp.csv"
    if opp_path.exists():
        rows = _read_csv(opp_path)
        by_key = {(r["match_id"], r["team_id"], r["window"]): r for r in rows}
        for (mid, tid, window), row in sorted(by_key.items()):
            if not window.startswith("before_"):
                continue
            event = window[len("before_") :]
            after = by_key.get((mid, tid, f"after_{event}"))
            if after is None:
                continue
            b = [float(row[f"opp_{i}"]) for i in range(ORBIT_COUNT)]
            a = [float(after[f"opp_{i}"]) for i in range(ORBIT_COUNT)]
            p = plots / f"opp_{mid}_{tid}_{event}.svg"
            plot_opp_pair(b, a, p, f"OPP match {mid} team {tid}, {event}")
            made.append(p)

    sp_path = res / "significance.csv"
    if sp_path.exists():
        rows = _read_csv(sp_path)
        by_key = {(r["match_id"], r["team_id"], r["window"]): r for r in rows}
        for (mid, tid, window), row in sorted(by_key.items()):
            if not window.startswith("before_"):
                continue
            event = window[len("before_") :]
            after = by_key.get((mid, tid, f"after_{event}"))
            if after is None:
                continue
            b = [float(row[f"sp_{i}"]) for i in range(MOTIF_COUNT)]
            a = [float(after[f"sp_{i}"]) for i in range(MOTIF_COUNT)]
            p = plots / f"sp_{mid}_{tid}_{event}.svg"
            plot_significance_pair(b, a, p, f"Significance match {mid} team {tid}, {event}")
            made.append(p)

    cent_path = res / "centrality.csv"
    if cent_path.exists():
        rows = _read_csv(cent_path)
        grouped: dict[tuple[str, str], list[float]] = {}
        for r in rows:
            if r["delta"] == "":
                continue
            grouped.setdefault((r["measure"], r["event_kind"]), []).append(float(r["delta"]))
        for (measure, event), values in sorted(grouped.items()):
            p = plots / f"hist_{measure}_{event}.svg"
            plot_delta_histogram(
                values,
                p,
                f"{measure} delta after {event}",
                "after minus before",
            )
            made.append(p)

    return made

"""Pajek .net serialization for passmaps.

Format, fixed byte for byte:

    *Vertices <n>
    1 "<label>"
    ...
    *Arcs
    <src> <dst> <weight>

Vertex numbering is 1-based in first-appearance order.  Labels are player
names when known, otherwise the player id rendered as text; metadata that
Pajek has no slot for (match id, team, split kind, window) travels in a JSON
sidecar written next to the .net file.
"""

from __future__ import annotations

import json
import os
from typing import Any

from .passmap import NodeId, NodeInfo, Passmap


class PajekError(ValueError):
    """Raised when a .net file cannot be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


def export_pajek_str(g: Passmap) -> str:
    index = {node: i + 1 for i, node in enumerate(g.nodes)}
    lines = [f"*Vertices {len(index)}"]
    for node, i in index.items():
        lines.append(f'{i} "{g.node_label(node)}"')
    lines.append("*Arcs")
    for (src, dst), w in g.arcs.items():
        lines.append(f"{index[src]} {index[dst]} {w}")
    return "\n".join(lines) + "\n"


def export_pajek(g: Passmap, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(export_pajek_str(g))


def _node_id_from_label(label: str) -> NodeId:
    # Pipeline-written files label vertices with the numeric player id;
    # anything else (names, synthetic sinks) stays a string key.
    if label and (label.isdigit() or (label[0] == "-" and label[1:].isdigit())):
        return int(label)
    return label


def import_pajek_str(text: str, team_id: int | None = None, label: str = "") -> Passmap:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("*vertices"):
        raise PajekError("expected *Vertices header", 1)
    parts = lines[0].split()
    try:
        n = int(parts[1])
    except (IndexError, ValueError) as exc:
        raise PajekError("malformed *Vertices header", 1) from exc

    g = Passmap(team_id=team_id, label=label)
    by_index: dict[int, NodeId] = {}
    for offset in range(n):
        lineno = 2 + offset
        if lineno - 1 >= len(lines):
            raise PajekError("vertex section truncated", lineno)
        line = lines[lineno - 1]
        first = line.find('"')
        last = line.rfind('"')
        if first < 0 or last <= first:
            raise PajekError("vertex line lacks a quoted label", lineno)
        try:
            idx = int(line[:first].split()[0])
        except (IndexError, ValueError) as exc:
            raise PajekError("vertex line lacks an index", lineno) from exc
        vertex_label = line[first + 1 : last]
        node = _node_id_from_label(vertex_label)
        by_index[idx] = node
        name = vertex_label if str(node) != vertex_label else None
        g.nodes[node] = NodeInfo(name=name)

    arcs_lineno = n + 2
    if arcs_lineno - 1 >= len(lines) or not lines[arcs_lineno - 1].lower().startswith("*arcs"):
        raise PajekError("expected *Arcs header", arcs_lineno)

    for offset, line in enumerate(lines[arcs_lineno:]):
        lineno = arcs_lineno + 1 + offset
        if not line.strip():
            continue
        if line.startswith("*"):
            raise PajekError(f"unsupported section {line.split()[0]!r}", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise PajekError("arc line must be: src dst weight", lineno)
        try:
            s, t, w = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise PajekError("arc line fields must be integers", lineno) from exc
        if s not in by_index or t not in by_index:
            raise PajekError("arc references an undeclared vertex", lineno)
        if w < 1:
            raise PajekError("arc weight must be >= 1", lineno)
        g.arcs[(by_index[s], by_index[t])] = w
    return g


def import_pajek(path: str | os.PathLike, team_id: int | None = None, label: str = "") -> Passmap:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return import_pajek_str(text, team_id=team_id, label=label)


def write_sidecar(g: Passmap, path: str | os.PathLike, **meta: Any) -> None:
    """JSON sidecar carrying the metadata Pajek cannot express."""
    payload = {
        "team_id": g.team_id,
        "label": g.label,
        "node_count": g.node_count,
        "arc_count": g.arc_count,
        "total_weight": g.total_weight,
        "nodes": [
            {
                "id": node,
                "label": g.node_label(node),
                "name": info.name,
                "line": info.line,
            }
            for node, info in g.nodes.items()
        ],
    }
    payload.update(meta)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

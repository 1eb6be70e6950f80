"""Graph sequence <-> transformation sequence, and edge-log ingestion.

The rules of one transition are emitted in a fixed phase order so that every
intermediate graph is well formed: vertex inserts, edge inserts, vertex
relabels, edge relabels, edge deletes, vertex deletes. Inside a phase rules are
sorted by target.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, TextIO

from .model import (ABSENT, GraphSequence, Kind, LabeledGraph,
                    TransformationRule, TransformationSequence, edge)


class InitialState(enum.Enum):
    #: g^(1) is encoded as insertions at interstate 1; replay starts empty.
    EMIT_INITIAL_INSERTS = "emit-initial-inserts"
    #: g^(1) is taken as given; replay starts from it.
    ASSUME_EMPTY_START = "assume-empty-start"


DEFAULT_INITIAL = InitialState.EMIT_INITIAL_INSERTS

PHASES = (Kind.VI, Kind.EI, Kind.VR, Kind.ER, Kind.ED, Kind.VD)


class ReplayError(ValueError):
    def __init__(self, rule: TransformationRule, reason: str):
        super().__init__(f"cannot apply {rule}: {reason}")
        self.rule = rule


def diff(a: LabeledGraph, b: LabeledGraph) -> list[tuple[Kind, object, str]]:
    """Minimal edit script from ``a`` to ``b`` as (kind, target, label), phase ordered."""
    by_phase: dict[Kind, list] = {k: [] for k in PHASES}
    for v, lab in b.vertices.items():
        if v not in a.vertices:
            by_phase[Kind.VI].append((v, lab))
        elif a.vertices[v] != lab:
            by_phase[Kind.VR].append((v, lab))
    for v in a.vertices:
        if v not in b.vertices:
            by_phase[Kind.VD].append((v, ABSENT))
    for e, lab in b.edges.items():
        if e not in a.edges:
            by_phase[Kind.EI].append((e, lab))
        elif a.edges[e] != lab:
            by_phase[Kind.ER].append((e, lab))
    for e in a.edges:
        if e not in b.edges:
            by_phase[Kind.ED].append((e, ABSENT))
    out = []
    for kind in PHASES:
        for target, lab in sorted(by_phase[kind]):
            out.append((kind, target, lab))
    return out


def compile_sequence(d: GraphSequence,
                     initial: InitialState = DEFAULT_INITIAL) -> TransformationSequence:
    graphs = list(d.interstates)
    if initial is InitialState.EMIT_INITIAL_INSERTS:
        graphs.insert(0, LabeledGraph())
    rules = []
    for j, (a, b) in enumerate(zip(graphs, graphs[1:]), 1):
        for k, (kind, target, lab) in enumerate(diff(a, b), 1):
            rules.append(TransformationRule(j, k, kind, target, lab))
    return TransformationSequence(tuple(rules), states=len(graphs) - 1)


def apply_rule(g: LabeledGraph, r: TransformationRule) -> None:
    """Apply ``r`` to ``g`` in place, enforcing the applicability conditions."""
    t = r.target
    if r.kind is Kind.VI:
        if t in g.vertices:
            raise ReplayError(r, "vertex already present")
        g.vertices[t] = r.label
    elif r.kind is Kind.VD:
        if t not in g.vertices:
            raise ReplayError(r, "vertex missing")
        if any(t in e for e in g.edges):
            raise ReplayError(r, "vertex is not isolated")
        del g.vertices[t]
    elif r.kind is Kind.VR:
        if t not in g.vertices:
            raise ReplayError(r, "vertex missing")
        if g.vertices[t] == r.label:
            raise ReplayError(r, "relabel to the same label")
        g.vertices[t] = r.label
    elif r.kind is Kind.EI:
        if t in g.edges:
            raise ReplayError(r, "edge already present")
        if t[0] not in g.vertices or t[1] not in g.vertices:
            raise ReplayError(r, "edge endpoint missing")
        g.edges[t] = r.label
    elif r.kind is Kind.ED:
        if t not in g.edges:
            raise ReplayError(r, "edge missing")
        del g.edges[t]
    else:
        if t not in g.edges:
            raise ReplayError(r, "edge missing")
        if g.edges[t] == r.label:
            raise ReplayError(r, "relabel to the same label")
        g.edges[t] = r.label


def decompile(s: TransformationSequence, g0: LabeledGraph | None = None,
              gid: str = "", initial: InitialState = DEFAULT_INITIAL) -> GraphSequence:
    """Replay ``s`` from ``g0`` (or the empty graph) and return the interstates.

    With ``EMIT_INITIAL_INSERTS`` the empty starting graph is not part of the
    result, so ``decompile(compile(d)) == d``.
    """
    g = g0.copy() if g0 is not None else LabeledGraph()
    by_j: dict[int, list[TransformationRule]] = {}
    for r in s:
        by_j.setdefault(r.j, []).append(r)
    out = [g.copy()]
    for j in range(1, s.states + 1):
        touched = set()
        for r in by_j.get(j, ()):
            if r.target in touched:
                raise ReplayError(r, "element edited twice in one transition")
            touched.add(r.target)
            apply_rule(g, r)
        out.append(g.copy())
    if initial is InitialState.EMIT_INITIAL_INSERTS and g0 is None:
        out = out[1:] or [LabeledGraph()]
    return GraphSequence(gid, out)


# --------------------------------------------------------------------------
# edge-log ingestion


@dataclass
class IngestReport:
    sequences: list[GraphSequence] = field(default_factory=list)
    fatal: bool = False  # the whole input was rejected, not just some records
    errors: list[tuple[int, str]] = field(default_factory=list)


def parse_duration(text: str | int | float) -> float:
    """``"7d"``, ``"12h"``, ``"30m"``, ``"45s"`` or a bare number (time units)."""
    if isinstance(text, (int, float)):
        return float(text)
    text = text.strip()
    units = {"w": 604800, "d": 86400, "h": 3600, "m": 60, "s": 1}
    if text and text[-1] in units:
        return float(text[:-1]) * units[text[-1]]
    return float(text)


def _parse_time(text: str) -> float:
    text = text.strip()
    try:
        return float(int(text))
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    # fromisoformat in 3.10 does not accept a trailing Z
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text).timestamp()


def ingest_edge_log(lines: TextIO | Iterable[str], window, snap=None,
                    default_vertex_label: str = "v") -> IngestReport:
    """Cut a timestamped edge log into one graph sequence per ``window``.

    Each window holds ``ceil(window / snap)`` interstates; interstate ``t`` is
    the graph of all records falling in the ``t``-th sub-interval. Windows are
    aligned to the earliest record. Malformed records are reported and skipped.
    """
    window = parse_duration(window)
    snap = window if snap is None else parse_duration(snap)
    if window <= 0 or snap <= 0:
        raise ValueError("window and snap must be positive")
    n_states = max(1, math.ceil(window / snap - 1e-9))
    report = IngestReport()
    reader = csv.reader(lines if not isinstance(lines, str) else io.StringIO(lines))
    header = next(reader, None)
    if header is None:
        return report
    header = [h.strip() for h in header]
    required = ["time", "src", "dst", "elabel"]
    if header[:4] != required:
        report.errors.append((1, f"header must start with {','.join(required)}"))
        report.fatal = True
        return report
    has_vlabels = header[4:6] == ["srclabel", "dstlabel"]
    records = []
    for lineno, row in enumerate(reader, 2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        try:
            if len(row) < 4:
                raise ValueError("expected at least 4 fields")
            t = _parse_time(row[0])
            u, v = int(row[1]), int(row[2])
            if u == v:
                raise ValueError("self-loop")
            elab = row[3].strip()
            if not elab or elab == "-":
                raise ValueError("empty edge label")
            ul = vl = default_vertex_label
            if has_vlabels and len(row) >= 6:
                ul, vl = row[4].strip() or ul, row[5].strip() or vl
            records.append((t, u, v, elab, ul, vl))
        except ValueError as exc:
            report.errors.append((lineno, str(exc)))
    if not records:
        return report
    t0 = min(r[0] for r in records)
    windows: dict[int, list[LabeledGraph]] = {}
    for t, u, v, elab, ul, vl in sorted(records, key=lambda r: r[0]):
        w = int((t - t0) // window)
        slot = min(int(((t - t0) - w * window) // snap), n_states - 1)
        graphs = windows.setdefault(w, [LabeledGraph() for _ in range(n_states)])
        g = graphs[slot]
        g.vertices[u] = ul
        g.vertices[v] = vl
        g.edges[edge(u, v)] = elab
    for w in sorted(windows):
        report.sequences.append(GraphSequence(f"w{w}", windows[w]))
    return report

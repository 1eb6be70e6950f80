"""Text formats.

Graph sequences (``.gsq``)::

    gid d1
    t 1
    v 1 A
    v 2 B
    e 1 2 _
    t 2
    ...
    end

Transformation sequences (``.tsq``), one rule per line ``<kind> <j> <k> <target> <label>``
with ``-`` for the absent label of deletions and edges written ``(u,v)``::

    gid d1
    states 3
    vi 1 1 1 A
    ei 2 1 (1,2) _
    end

Patterns (``.pat``): the rule lines of each pattern, then ``support <n>``, then a
blank line. ``#`` starts a comment in every format.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .model import (ABSENT, GraphSequence, Kind, LabeledGraph,
                    TransformationRule, TransformationSequence, edge, pattern)


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str, source: str = "<input>"):
        super().__init__(f"{source}:{lineno}: {message}")
        self.lineno = lineno
        self.source = source


def _lines(src: TextIO | str | Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    if isinstance(src, str):
        src = src.splitlines()
    for lineno, line in enumerate(src, 1):
        line = line.split("#", 1)[0].strip()
        yield lineno, line.split()


def _label(tok: str) -> str:
    if tok == "-" or tok == "•":
        raise ValueError(f"{tok!r} is reserved for the absent label")
    return tok


# --------------------------------------------------------------------------
# graph sequences


def read_gsq(src, source: str = "<input>") -> list[GraphSequence]:
    out: list[GraphSequence] = []
    gid = None
    graphs: list[LabeledGraph] = []
    cur: LabeledGraph | None = None
    expected_t = 1
    start = 0
    for lineno, toks in _lines(src):
        if not toks:
            continue
        try:
            head = toks[0]
            if head == "gid":
                if gid is not None:
                    raise ParseError(lineno, f"missing 'end' for {gid!r}", source)
                if len(toks) != 2:
                    raise ParseError(lineno, "expected 'gid <name>'", source)
                gid, graphs, cur, expected_t, start = toks[1], [], None, 1, lineno
            elif gid is None:
                raise ParseError(lineno, f"{head!r} outside a 'gid' block", source)
            elif head == "t":
                if len(toks) != 2 or int(toks[1]) != expected_t:
                    raise ParseError(lineno, f"expected 't {expected_t}'", source)
                cur = LabeledGraph()
                graphs.append(cur)
                expected_t += 1
            elif head == "v":
                if cur is None or len(toks) != 3:
                    raise ParseError(lineno, "expected 'v <id> <label>' after 't'", source)
                v = int(toks[1])
                if v < 0 or v in cur.vertices:
                    raise ParseError(lineno, f"bad or duplicate vertex id {v}", source)
                cur.vertices[v] = _label(toks[2])
            elif head == "e":
                if cur is None or len(toks) != 4:
                    raise ParseError(lineno, "expected 'e <id1> <id2> <label>' after 't'", source)
                u, v = int(toks[1]), int(toks[2])
                if u not in cur.vertices or v not in cur.vertices:
                    raise ParseError(lineno, f"edge ({u},{v}) has an undeclared endpoint", source)
                e = edge(u, v)
                if e in cur.edges:
                    raise ParseError(lineno, f"duplicate edge {e}", source)
                cur.edges[e] = _label(toks[3])
            elif head == "end":
                if not graphs:
                    raise ParseError(start, f"sequence {gid!r} has no interstates", source)
                out.append(GraphSequence(gid, graphs))
                gid = None
            else:
                raise ParseError(lineno, f"unknown record {head!r}", source)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(lineno, str(exc), source) from None
    if gid is not None:
        raise ParseError(start, f"missing 'end' for {gid!r}", source)
    return out


def write_gsq(seqs: Iterable[GraphSequence], out: TextIO) -> None:
    for d in seqs:
        out.write(f"gid {d.gid}\n")
        for t, g in enumerate(d.interstates, 1):
            out.write(f"t {t}\n")
            for v in sorted(g.vertices):
                out.write(f"v {v} {g.vertices[v]}\n")
            for (u, v) in sorted(g.edges):
                out.write(f"e {u} {v} {g.edges[(u, v)]}\n")
        out.write("end\n")


# --------------------------------------------------------------------------
# rules


def format_rule(r: TransformationRule) -> str:
    if isinstance(r.target, int):
        tgt = str(r.target)
    else:
        tgt = f"({r.target[0]},{r.target[1]})"
    lab = "-" if r.label == ABSENT else r.label
    return f"{r.kind} {r.j} {r.k} {tgt} {lab}"


def parse_rule(toks: list[str]) -> TransformationRule:
    if len(toks) != 5:
        raise ValueError("expected '<kind> <j> <k> <target> <label>'")
    kind = Kind.parse(toks[0])
    j, k = int(toks[1]), int(toks[2])
    raw = toks[3].strip("()")
    if "," in raw:
        a, b = raw.split(",")
        target: object = (int(a), int(b))
    else:
        target = int(raw)
    lab = ABSENT if toks[4] == "-" else _label(toks[4])
    return TransformationRule(j, k, kind, target, lab)


def read_tsq(src, source: str = "<input>") -> list[tuple[str, TransformationSequence]]:
    out = []
    gid = None
    rules: list[TransformationRule] = []
    states = 0
    start = 0
    for lineno, toks in _lines(src):
        if not toks:
            continue
        try:
            if toks[0] == "gid":
                if gid is not None:
                    raise ParseError(lineno, f"missing 'end' for {gid!r}", source)
                if len(toks) != 2:
                    raise ParseError(lineno, "expected 'gid <name>'", source)
                gid, rules, states, start = toks[1], [], 0, lineno
            elif gid is None:
                raise ParseError(lineno, f"{toks[0]!r} outside a 'gid' block", source)
            elif toks[0] == "states":
                states = int(toks[1])
            elif toks[0] == "end":
                out.append((gid, TransformationSequence(tuple(rules), states=states)))
                gid = None
            else:
                rules.append(parse_rule(toks))
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(lineno, str(exc), source) from None
    if gid is not None:
        raise ParseError(start, f"missing 'end' for {gid!r}", source)
    return out


def write_tsq(db: Iterable[tuple[str, TransformationSequence]], out: TextIO) -> None:
    for gid, s in db:
        out.write(f"gid {gid}\nstates {s.states}\n")
        for r in s:
            out.write(format_rule(r) + "\n")
        out.write("end\n")


# --------------------------------------------------------------------------
# patterns


@dataclass(frozen=True)
class PatternRecord:
    sequence: TransformationSequence
    support: int


def read_patterns(src, source: str = "<input>") -> list[PatternRecord]:
    out = []
    rules: list[TransformationRule] = []
    for lineno, toks in _lines(src):
        if not toks:
            continue
        try:
            if toks[0] == "support":
                if len(toks) != 2:
                    raise ParseError(lineno, "expected 'support <n>'", source)
                out.append(PatternRecord(pattern(rules), int(toks[1])))
                rules = []
            else:
                rules.append(parse_rule(toks))
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(lineno, str(exc), source) from None
    if rules:
        raise ParseError(lineno, "pattern without a 'support' line", source)
    return out


def write_patterns(records: Iterable[PatternRecord], out: TextIO) -> None:
    for rec in records:
        for r in rec.sequence:
            out.write(format_rule(r) + "\n")
        out.write(f"support {rec.support}\n\n")


def sniff(path: str | Path) -> str:
    """'gsq' or 'tsq' by extension, falling back to content."""
    p = Path(path)
    if p.suffix in (".gsq", ".tsq"):
        return p.suffix[1:]
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            toks = line.split("#", 1)[0].split()
            if toks and toks[0] in ("t", "v", "e"):
                return "gsq"
            if toks and (toks[0] == "states" or toks[0] in {str(k) for k in Kind}):
                return "tsq"
    return "gsq"

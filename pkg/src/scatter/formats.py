"""JSON documents for diagrams, seeds, completion reports and structure constants.

All documents carry ``"schema": "scatter/v1"``.  :func:`dumps` is the only
serializer: sorted keys, two-space indent and a trailing newline, so equal
objects give byte-identical files.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .diagram import ScatteringDiagram, Wall, sorted_walls
from .errors import DomainError
from .lattice import RationalCone
from .series import MonoidContext, TruncatedSeries, format_rational, parse_rational

SCHEMA = "scatter/v1"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON: {exc}") from exc


def digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode() if isinstance(p, str) else dumps(p).encode())
        h.update(b"\0")
    return h.hexdigest()


def _check_schema(doc):
    if not isinstance(doc, dict):
        raise DomainError("expected a JSON object")
    if doc.get("schema") != SCHEMA:
        raise DomainError(f"unsupported schema {doc.get('schema')!r}; expected {SCHEMA!r}")


def _ints(v, what):
    try:
        out = tuple(int(x) for x in v)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{what} must be a list of integers") from exc
    if any(not isinstance(x, int) or isinstance(x, bool) for x in v):
        raise DomainError(f"{what} must be a list of integers")
    return out


def vector_key(v) -> str:
    return ",".join(str(int(x)) for x in v)


def parse_vector(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise DomainError(f"bad integer vector {text!r}") from exc


def parse_point(text: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad rational point {text!r}") from exc


def point_json(p) -> list:
    return [format_rational(x) for x in p]


# -- contexts, series, cones, walls


def context_to_json(ctx: MonoidContext) -> dict:
    return {"names": list(ctx.names), "weights": list(ctx.weights)}


def context_from_json(doc) -> MonoidContext:
    try:
        return MonoidContext(list(doc["names"]), _ints(doc.get("weights", [1] * len(doc["names"])),
                                                       "weights"))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed q_generators: {exc}") from exc


def cone_to_json(c: RationalCone) -> dict:
    return {"equations": [list(e) for e in c.equations],
            "inequalities": [list(b) for b in c.inequalities]}


def wall_to_json(w: Wall) -> dict:
    return {"normal": list(w.normal),
            "inequalities": [list(b) for b in w.support.inequalities],
            "direction": list(w.direction),
            "function": w.function.to_json()}


def wall_from_json(doc, rank, ctx, order) -> Wall:
    try:
        normal = _ints(doc["normal"], "normal")
        ineqs = [_ints(b, "inequality") for b in doc.get("inequalities", [])]
        direction = _ints(doc["direction"], "direction") if doc.get("direction") is not None else None
        terms = doc["function"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed wall: {exc}") from exc
    if len(normal) != rank or any(len(b) != rank for b in ineqs):
        raise DomainError("wall normal or inequality has the wrong rank")
    support = RationalCone(rank, [normal], ineqs)
    try:
        f = TruncatedSeries.from_json(ctx, rank, order, terms)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"malformed wall function: {exc}") from exc
    return Wall(support, f, direction)


# -- diagrams


def diagram_to_json(d: ScatteringDiagram, meta: dict | None = None) -> dict:
    doc = {"schema": SCHEMA,
           "ambient_rank": d.ambient_rank,
           "q_generators": context_to_json(d.context),
           "order": d.order,
           "walls": [wall_to_json(w) for w in sorted_walls(d.walls)]}
    if meta:
        doc["meta"] = meta
    return doc


def diagram_from_json(doc) -> tuple[ScatteringDiagram, dict]:
    """Parse a diagram file, or the ``output`` of a completion report; returns ``(diagram, meta)``."""
    _check_schema(doc)
    if doc.get("kind") == "completion-report":
        return diagram_from_json(doc["output"])
    try:
        rank = int(doc["ambient_rank"])
        order = int(doc["order"])
        ctx = context_from_json(doc["q_generators"])
        walls = [wall_from_json(w, rank, ctx, order) for w in doc["walls"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed diagram file: {exc}") from exc
    if order < 0 or rank < 1:
        raise DomainError("order must be non-negative and rank positive")
    return ScatteringDiagram(rank, ctx, order, walls), dict(doc.get("meta") or {})


# -- reports


def completion_report_to_json(report, meta: dict | None = None) -> dict:
    return {"schema": SCHEMA,
            "kind": "completion-report",
            "input": diagram_to_json(report.input, meta),
            "output": diagram_to_json(report.output, meta),
            "added": [{"order": a.order, "joint": cone_to_json(a.joint), "wall": wall_to_json(a.wall)}
                      for a in report.added]}


def consistency_to_json(rep) -> dict:
    fails = []
    for jt, defect in rep.failures:
        fails.append({"joint": cone_to_json(jt.cell),
                      "point": point_json(jt.point),
                      "defect": [h.to_json() for h in defect]})
    return {"schema": SCHEMA, "kind": "consistency", "consistent": bool(rep.consistent),
            "failures": fails}


def series_to_json(s: TruncatedSeries) -> list:
    return s.to_json()


def theta_to_json(exp, order) -> dict:
    return {"schema": SCHEMA, "kind": "theta", "order": order, "m": list(exp.m),
            "p": point_json(exp.p), "series": exp.series.to_json()}


def row_to_json(row: dict) -> dict:
    return {vector_key(m): c.to_json() for m, c in sorted(row.items())}


def table_to_json(rows: dict, order: int, strategy: str) -> dict:
    """``rows`` maps ``(m1, m2)`` to a row ``{m: coefficient}``."""
    return {"schema": SCHEMA, "kind": "structure-constants", "order": order, "strategy": strategy,
            "rows": {f"{vector_key(a)};{vector_key(b)}": row_to_json(r)
                     for (a, b), r in sorted(rows.items())}}


def table_from_json(doc, ctx: MonoidContext, rank: int) -> dict:
    _check_schema(doc)
    order = int(doc["order"])
    out = {}
    for key, row in doc["rows"].items():
        a, b = key.split(";")
        out[(parse_vector(a), parse_vector(b))] = {
            parse_vector(m): TruncatedSeries.from_json(ctx, rank, order, terms)
            for m, terms in row.items()}
    return out


__all__ = ["SCHEMA", "dumps", "loads", "digest", "diagram_to_json", "diagram_from_json",
           "completion_report_to_json", "consistency_to_json", "table_to_json", "table_from_json",
           "theta_to_json", "wall_to_json", "wall_from_json", "parse_vector", "parse_point",
           "parse_rational", "format_rational"]

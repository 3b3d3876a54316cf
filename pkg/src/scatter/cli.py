"""The ``scatter`` command line tool.

Structured output is JSON (or SVG for ``plot``) on stdout or ``--out``;
summaries and errors go to stderr.  Exit codes: 0 ok, 1 a checked property
failed, 2 bad input, 3 a seed assumption failed, 4 an algorithm
precondition failed.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import escape

from . import __version__
from .cluster import KINDS, Seed, initial_diagram, psi
from .completion import complete
from .diagram import equivalent, is_consistent, sorted_walls
from .errors import (AssumptionError, CompletionError, DimensionError, DomainError, GenericityError,
                     NonTransversalPathError, PreconditionError, PsiConditionError, ScatterError)
from .formats import (SCHEMA, completion_report_to_json, consistency_to_json, diagram_from_json,
                      diagram_to_json, digest, dumps, loads, parse_point, parse_vector,
                      table_to_json, theta_to_json)
from .theta import ThetaAlgebra, theta

CACHE_ENV = "SCATTER_CACHE"

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_ASSUMPTION, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class _Failure(Exception):
    """A checked property failed; carries the JSON verdict to emit."""

    def __init__(self, text):
        self.text = text


# ---------------------------------------------------------------- plumbing


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: str | None):
    if out:
        _atomic_write(Path(out), text)
    else:
        sys.stdout.write(text)


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_diagram(path):
    return diagram_from_json(loads(_read(path)))


def _load_seed(path) -> Seed:
    doc = loads(_read(path))
    if isinstance(doc, dict) and "schema" in doc and doc["schema"] != SCHEMA:
        raise DomainError(f"unsupported schema {doc['schema']!r}")
    return Seed.from_json(doc)


def _note(msg: str):
    print(msg, file=sys.stderr)


def _cache_dir(args) -> Path | None:
    root = args.cache or os.environ.get(CACHE_ENV)
    return Path(root) if root else None


# ---------------------------------------------------------------- commands


def cmd_seed_init(args):
    seed = _load_seed(args.seed)
    d = initial_diagram(seed, args.kind, args.order)
    _emit(dumps(diagram_to_json(d, {"kind": args.kind, "seed": seed.to_json()})), args.out)


def cmd_complete(args):
    d, meta = _load_diagram(args.diagram)
    order = d.order if args.order is None else args.order
    source = dumps(diagram_to_json(d, meta))
    key = digest(source, str(order), __version__)
    cache = _cache_dir(args)
    entry = cache / key[:2] / f"{key}.json" if cache else None
    text = None
    if entry is not None and entry.exists():
        text = entry.read_text(encoding="utf-8")
        _note(f"cache hit {key[:12]}")
    if text is None:
        report = complete(d, order)
        text = dumps(completion_report_to_json(report, meta))
        if entry is not None:
            _atomic_write(entry, text)
    doc = loads(text)
    if args.report:
        _atomic_write(Path(args.report), text)
    _note(f"completed to order {order}: {len(doc['output']['walls'])} walls, "
          f"{len(doc['added'])} added")
    _emit(dumps(doc["output"]), args.out)


def cmd_check(args):
    d, _meta = _load_diagram(args.diagram)
    rep = is_consistent(d, args.order)
    text = dumps(consistency_to_json(rep))
    if not rep.consistent:
        raise _Failure(text)
    _emit(text, args.out)


def cmd_equiv(args):
    d1, _ = _load_diagram(args.first)
    d2, _ = _load_diagram(args.second)
    ok = equivalent(d1, d2)
    text = dumps({"schema": SCHEMA, "kind": "equivalence", "equivalent": ok,
                  "order": min(d1.order, d2.order)})
    if not ok:
        raise _Failure(text)
    _emit(text, args.out)


def cmd_psi(args):
    d, meta = _load_diagram(args.diagram)
    if args.seed:
        seed = _load_seed(args.seed)
    elif "seed" in meta:
        seed = Seed.from_json(meta["seed"])
    else:
        raise DomainError("psi needs a seed: pass --seed or use a file written by seed-init")
    out = psi(d, seed)
    _emit(dumps(diagram_to_json(out, {"kind": "psi", "seed": seed.to_json()})), args.out)


def cmd_theta(args):
    d, _ = _load_diagram(args.diagram)
    order = d.order if args.order is None else args.order
    m = parse_vector(args.m)
    if args.p is not None:
        exp = theta(d, m, parse_point(args.p), order)
    else:
        alg = ThetaAlgebra(d, order, args.seed_stream, check=False)
        exp = alg.near((0,) * d.ambient_rank, "theta", lambda p: theta(d, m, p, order))
    _emit(dumps(theta_to_json(exp, order)), args.out)


def cmd_multiply(args):
    d, _ = _load_diagram(args.diagram)
    order = d.order if args.order is None else args.order
    alg = ThetaAlgebra(d, order, args.seed_stream)
    m1, m2 = parse_vector(args.m1), parse_vector(args.m2)
    if len(m1) != d.ambient_rank or len(m2) != d.ambient_rank:
        raise DimensionError("exponents must match the ambient rank")
    row = alg.row(m1, m2, args.strategy)
    _emit(dumps(table_to_json({(m1, m2): row}, order, args.strategy)), args.out)


def cmd_plot(args):
    d, _ = _load_diagram(args.diagram)
    if d.ambient_rank != 2:
        raise DimensionError("plot needs a rank-2 diagram")
    _emit(render_svg(d, Fraction(args.bbox)), args.out)


# ---------------------------------------------------------------- svg


def _fmt(x) -> str:
    s = f"{float(x):.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(d, bbox=Fraction(3), size=400) -> str:
    """Deterministic SVG of a rank-2 diagram clipped to ``[-bbox, bbox]^2``."""
    scale = Fraction(size, 2) / bbox

    def xy(p):
        return _fmt(Fraction(size, 2) + p[0] * scale), _fmt(Fraction(size, 2) - p[1] * scale)

    def clip(v):
        t = bbox / max(abs(Fraction(c)) for c in v)
        return tuple(Fraction(c) * t for c in v)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<path class="axis" d="M 0 {size // 2} H {size} M {size // 2} 0 V {size}" '
        'stroke="#bbbbbb" stroke-width="1" fill="none"/>',
    ]
    for i, w in enumerate(sorted_walls(d.walls)):
        c = w.support
        if c.lines:
            a, b = clip(tuple(-x for x in c.lines[0])), clip(c.lines[0])
        else:
            a, b = (0, 0), clip(c.rays[0])
        (x1, y1), (x2, y2) = xy(a), xy(b)
        label = escape(w.function.pretty(max_terms=3))
        lines.append(f'<line class="wall" id="wall{i}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                     'stroke="black" stroke-width="1.5"/>')
        lx, ly = xy(tuple(Fraction(9, 10) * t for t in b))
        lines.append(f'<text x="{lx}" y="{ly}" font-size="10" font-family="monospace">{label}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatter", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"scatter {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="write to this file instead of stdout")
        return p

    p = add("seed-init", cmd_seed_init, "initial diagram of a seed")
    p.add_argument("seed")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--order", type=int, required=True)

    p = add("complete", cmd_complete, "consistent completion of a diagram")
    p.add_argument("diagram")
    p.add_argument("--order", type=int)
    p.add_argument("--cache", help=f"cache directory (default ${CACHE_ENV}; unset disables)")
    p.add_argument("--report", help="also write the completion report here")

    p = add("check", cmd_check, "check consistency")
    p.add_argument("diagram")
    p.add_argument("--order", type=int)

    p = add("equiv", cmd_equiv, "check equivalence of two diagrams")
    p.add_argument("first")
    p.add_argument("second")

    p = add("psi", cmd_psi, "quotient a principal-coefficient diagram by N")
    p.add_argument("diagram")
    p.add_argument("--seed")

    p = add("theta", cmd_theta, "local expansion of a theta function")
    p.add_argument("diagram")
    p.add_argument("--m", required=True, help="exponent, e.g. -1,-1")
    p.add_argument("--p", help="endpoint, e.g. 1/10,1 (default: generic near the origin)")
    p.add_argument("--order", type=int)
    p.add_argument("--seed-stream", type=int, default=0)

    p = add("multiply", cmd_multiply, "structure constants of a product of two theta functions")
    p.add_argument("diagram")
    p.add_argument("--m1", required=True)
    p.add_argument("--m2", required=True)
    p.add_argument("--order", type=int)
    p.add_argument("--strategy", choices=("decomposition", "broken-pairs"), default="decomposition")
    p.add_argument("--seed-stream", type=int, default=0)

    p = add("plot", cmd_plot, "SVG picture of a rank-2 diagram")
    p.add_argument("diagram")
    p.add_argument("--bbox", default="3")
    return ap


def _error(code, exc) -> int:
    sys.stderr.write(dumps({"schema": SCHEMA, "kind": "error", "error": type(exc).__name__,
                            "message": str(exc), "exit_code": code}))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except _Failure as f:
        _emit(f.text, args.out)
        return EXIT_FAILED
    except AssumptionError as exc:
        return _error(EXIT_ASSUMPTION, exc)
    except (PreconditionError, CompletionError, GenericityError, NonTransversalPathError,
            PsiConditionError) as exc:
        return _error(EXIT_PRECONDITION, exc)
    except (ScatterError, ValueError) as exc:
        return _error(EXIT_INPUT, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Subcommands
-----------
``synth``
    Curvatures to a frame and graph over a grid (CSV) plus a graph jet at
    the start point (JSON) that ``analyze`` reads back.
``analyze``
    Curve to weight, flag dimensions, modified curvatures and principal
    curvatures at its base point, or over a grid with ``--range``.
``invariants``
    Principal curvatures together with the trace check of the cross-ratio
    and, with ``--probe``, estimates of the relation constants.
``crossratio``
    Trace of the infinitesimal cross-ratio against the base point over a
    grid (CSV).
``roundtrip``
    Synthesize, recover and compare.
``selftest``
    The acceptance suite.

Curve specifications
--------------------
A JSON document (file path or inline text) with the fields

``m``
    Half dimension; optional when it follows from ``entries``.
``representation``
    ``"graph"`` (``entries`` is an ``m x m`` matrix, lower triangle may be
    ``null``), ``"generator"`` (``2m`` components) or ``"lambda"``
    (``m`` curvatures, plus optional ``"sign"``).
``entries``
    Each entry is an expression in ``t`` or a coefficient list
    ``[c0, c1, ...]`` meaning ``c0 + c1 (t - base) + ...``.  Coefficients
    may be numbers or ``"p/q"`` strings.
``base``
    Base point, default 0.
``order``
    Jet order, default depends on the command.
``chart``
    Graph chart indices, for graphs exported by ``synth``.

Exit status is 0 on success, 1 for bad input, 2 when a mathematical
precondition fails and 3 when a tolerance is breached or the self test
fails.
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from gmpy2 import mpq

from .curves import (
    ExprGeneratorCurve,
    ExprGraphCurve,
    GraphCurve,
    JetGraphSource,
    flag,
    graph_from_basis,
    to_graph,
    weight,
)
from .errors import LGIError, MathError, SpecError, ToleranceError
from .expr import parse
from .frame import canonical_frame
from .invariants import cross_ratio, generating_function, probe_lambda_beta, trace_asymptotic_check
from .rings import get_ring
from .series import Jet
from .synthesis import (
    CurvatureSpec,
    LambdaCurve,
    random_polynomial_spec,
    roundtrip,
    synthesize_interval,
    synthesize_local,
)

__all__ = ["RunConfig", "dumps", "load_curve", "main", "run"]

COMMANDS = ("synth", "analyze", "invariants", "crossratio", "roundtrip", "selftest")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MATH = 2
EXIT_TOLERANCE = 3


# -- serialization -------------------------------------------------------------
def _scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if type(x) is type(mpq(0)) or isinstance(x, Fraction):
        if x.denominator == 1:
            return f"{x.numerator}"
        return f"{x.numerator}/{x.denominator}"
    return x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    obj = _scalar(obj)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return json.dumps(str(obj))
        return "%.17g" % obj
    return json.dumps(str(obj))


def dumps(obj, indent=2):
    """Deterministic JSON text.

    Dictionaries keep insertion order, floats are written with 17
    significant digits and exact rationals as ``"p/q"`` strings, so the
    same report always serializes to the same bytes.

    Examples
    --------
    >>> print(dumps({"a": 0.1, "b": [mpq(1, 3), 2]}), end="")
    {
      "a": 0.10000000000000001,
      "b": ["1/3", 2]
    }
    """
    return _encode(obj, indent, 0) + "\n"


def _coeffs(jet):
    return [_scalar(v) for v in jet.coeffs.reshape(-1)]


def _value(x, ring):
    return _scalar(x) if ring.exact else float(x)


# -- specifications ------------------------------------------------------------
def _read_document(text):
    """Parse ``text`` as JSON, or as a path to a JSON file."""
    text = text.strip()
    if text.startswith("{"):
        source = text
    else:
        path = Path(text)
        if not path.is_file():
            raise SpecError(f"spec file not found: {text}")
        source = path.read_text()
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SpecError("a spec must be a JSON object")
    # synth reports carry the curve under "curve"
    if "representation" not in doc and isinstance(doc.get("curve"), dict):
        doc = doc["curve"]
    return doc


def _number(x, ring):
    if isinstance(x, Fraction) or type(x) is type(mpq(0)):
        return ring.coerce(Fraction(x.numerator, x.denominator)) if ring.exact else float(x)
    if isinstance(x, str):
        try:
            f = Fraction(x.replace("−", "-").strip())
        except ValueError:
            raise SpecError(f"not a number: {x!r}") from None
    elif isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SpecError(f"not a number: {x!r}")
    elif isinstance(x, float):
        if ring.exact:
            f = Fraction(x)
        else:
            return float(x)
    else:
        f = Fraction(x)
    return ring.coerce(f) if ring.exact else float(f)


def _poly_text(coeffs, base):
    """Expression text of ``sum c_k (t - base)^k``."""
    var = "t" if base == 0 else f"(t - ({Fraction(base)}))"
    terms = []
    for k, c in enumerate(coeffs):
        if isinstance(c, float):
            c = Fraction(c)
        c = Fraction(str(c).replace("−", "-")) if isinstance(c, str) else Fraction(c)
        if c == 0:
            continue
        terms.append(f"({c})" if k == 0 else f"({c})*{var}" if k == 1 else f"({c})*{var}^{k}")
    return " + ".join(terms) if terms else "0"


def _entry_text(entry, base):
    if isinstance(entry, (list, tuple)):
        return _poly_text(entry, base)
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return _poly_text([entry], base)
    if isinstance(entry, str):
        return entry
    raise SpecError(f"entry must be an expression or a coefficient list, got {entry!r}")


class _CoefficientGraph:
    """Graph curve fixed by Taylor coefficient lists at a base point."""

    def __init__(self, entries, base, chart):
        self.entries = entries
        self.base = base
        self.chart = tuple(chart)
        self.m = len(entries)

    def graph(self, ring):
        m = self.m
        n = max(len(self.entries[i][j]) for i in range(m) for j in range(m))
        c = ring.zeros((n, m, m))
        for i in range(m):
            for j in range(m):
                col = self.entries[i][j]
                for p, v in enumerate(col):
                    c[p, i, j] = _number(v, ring)
        base = _number(self.base, ring)
        return GraphCurve(Jet(c, ring, base), self.chart)

    def at(self, tau, order=None, ring="float"):
        ring = get_ring(ring)
        src = JetGraphSource(self.graph(ring))
        return src.at(tau, order, ring)


@dataclass
class CurveInput:
    """A parsed curve specification."""

    source: object
    m: int
    representation: str
    base: object
    order: object = None
    spec: object = None
    document: dict = field(default_factory=dict)

    def graph(self, ring, order):
        ring = get_ring(ring)
        base = _number(self.base, ring)
        if isinstance(self.source, _CoefficientGraph):
            g = self.source.graph(ring)
            return g if order is None or order >= g.order else g.truncate(order)
        return to_graph(self.source.at(base, order, ring))


def load_curve(doc, ring="float"):
    """Build a curve source from a specification document.

    Parameters
    ----------
    doc : dict or str
        The document, or JSON text, or a path to a JSON file.

    Returns
    -------
    CurveInput

    Raises
    ------
    SpecError
        On schema errors; :class:`lgi.errors.ParseError` (a subclass) for
        malformed expressions, with the position of the problem.
    """
    if isinstance(doc, str):
        doc = _read_document(doc)
    rep = doc.get("representation", "graph")
    entries = doc.get("entries")
    base = doc.get("base", 0)
    if isinstance(base, float):
        base = Fraction(base)
    base = Fraction(str(base).replace("−", "-")) if isinstance(base, str) else Fraction(base)
    if entries is None:
        raise SpecError("spec has no 'entries'")
    if not isinstance(entries, list) or not entries:
        raise SpecError("'entries' must be a non-empty list")
    order = doc.get("order")
    if order is not None and (not isinstance(order, int) or order < 0):
        raise SpecError("'order' must be a non-negative integer")
    m = doc.get("m")
    spec = None
    if rep == "graph":
        if not all(isinstance(row, list) for row in entries):
            raise SpecError("graph entries must be an m x m matrix")
        n = len(entries)
        lists = all(
            isinstance(e, list) or (e is None and isinstance(entries[j][i], list))
            for i, row in enumerate(entries)
            for j, e in enumerate(row)
        ) if all(len(r) == n for r in entries) else False
        if lists:
            full = [[entries[i][j] if entries[i][j] is not None else entries[j][i] for j in range(n)] for i in range(n)]
            source = _CoefficientGraph(full, base, doc.get("chart", ()))
        else:
            rows = [[None if e is None else _entry_text(e, base) for e in row] for row in entries]
            source = ExprGraphCurve(rows)
            if doc.get("chart"):
                raise SpecError("'chart' is only supported with coefficient lists")
        size = n
    elif rep == "generator":
        source = ExprGeneratorCurve([_entry_text(e, base) for e in entries])
        size = source.m
    elif rep == "lambda":
        spec = CurvatureSpec([parse(_entry_text(e, base)) for e in entries], int(doc.get("sign", 1)))
        source = LambdaCurve(spec, t0=base)
        size = spec.m
    else:
        raise SpecError(f"unknown representation {rep!r}; use graph, generator or lambda")
    if m is not None and m != size:
        raise SpecError(f"spec says m = {m} but its entries have m = {size}")
    return CurveInput(source, size, rep, base, order, spec, doc)


# -- configuration -------------------------------------------------------------
@dataclass
class RunConfig:
    """Validated options of one CLI run.

    Defaults: float ring, seed 0, grid step 0.05; the jet order depends on
    the command (``m^2 + 2m + 2`` for synthesis, ``2m^2 + 2m + 2`` for
    analysis, enough for every curvature and ``beta_0 .. beta_{2m-2}``).
    """

    command: str
    spec: object = None
    rho: list = None
    m: int = None
    ring: str = "float"
    order: int = None
    step: float = 0.05
    grid: tuple = None
    out: str = None
    seed: int = 0
    probe: list = None
    only: list = None

    def validate(self):
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        if self.ring not in ("float", "rational"):
            raise SpecError("ring must be 'float' or 'rational'")
        if self.order is not None and self.order < 0:
            raise SpecError("order must be non-negative")
        if not self.step > 0:
            raise SpecError("step must be positive")
        if self.m is not None and self.m < 1:
            raise SpecError("m must be at least 1")
        if self.spec is not None and self.rho:
            raise SpecError("give either --spec or --rho, not both")
        if self.command in ("analyze", "invariants", "crossratio") and self.spec is None and not self.rho:
            raise SpecError(f"{self.command} needs --spec or --rho")
        if self.command == "synth" and self.spec is None and not self.rho:
            raise SpecError("synth needs --spec or --rho")
        return self


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("range must look like a:b")
    try:
        return float(Fraction(parts[0])), float(Fraction(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _parse_values(text):
    try:
        return [Fraction(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from None


class _Parser(argparse.ArgumentParser):
    """Report usage errors as input errors (exit 1) instead of argparse's 2."""

    def error(self, message):
        raise SpecError(message)


def build_parser():
    p = _Parser(prog="lgi", description="Invariants and synthesis of rank 1 Lagrangian curves.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", help="curve or curvature spec: JSON file path or inline JSON")
    p.add_argument("--rho", action="append", help="curvature expression, once per lambda_i (use --rho=-1 for negatives)")
    p.add_argument("--m", type=int, help="half dimension (checked against the spec; roundtrip without a spec draws a random one)")
    p.add_argument("--ring", choices=("float", "rational"), default="float")
    p.add_argument("--order", type=int, help="jet order")
    p.add_argument("--step", type=float, default=0.05, help="grid step")
    p.add_argument("--range", dest="grid", type=_parse_range, help="grid interval a:b")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probe", type=_parse_values, help="invariants: comma separated constants c for the lambda_m = c probe family (use --probe=-1,2 when the first is negative)")
    p.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], help="selftest: criterion numbers")
    return p


def config_from_args(argv=None):
    ns = build_parser().parse_args(argv)
    spec = None if ns.spec is None else _read_document(ns.spec)
    return RunConfig(
        ns.command, spec, ns.rho, ns.m, ns.ring, ns.order, ns.step, ns.grid, ns.out, ns.seed, ns.probe, ns.only
    ).validate()


# -- commands ------------------------------------------------------------------
def _curve(cfg):
    if cfg.rho:
        doc = {"representation": "lambda", "entries": cfg.rho}
    else:
        doc = cfg.spec
    c = load_curve(doc, cfg.ring)
    if cfg.m is not None and cfg.m != c.m:
        raise SpecError(f"--m {cfg.m} does not match the spec (m = {c.m})")
    return c


def _analysis_order(cfg, c):
    if cfg.order is not None:
        return cfg.order
    if c.order is not None:
        return c.order
    m = c.m
    return 2 * m * m + 2 * m + 2


def _grid(cfg, start):
    a, b = cfg.grid if cfg.grid else (float(start), float(start) + 1.0)
    n = int(np.floor(abs(b - a) / cfg.step + 1e-9))
    pts = [a + np.sign(b - a) * cfg.step * i for i in range(n + 1)]
    if abs(pts[-1] - b) > 1e-12:
        pts.append(b)
    return [float(x) for x in pts]


def analyze_graph(g):
    """Weight, flag dimensions, curvatures and principal curvatures of a jet."""
    ring = g.ring
    m = g.m
    k = weight(g)
    fl = flag(g)
    res = canonical_frame(g)
    out = {
        "t": _value(g.base, ring),
        "m": m,
        "ring": ring.name,
        "order": g.order,
        "chart": list(g.chart),
        "k": k,
        "extension_dims": [b.shape[1] for b in fl.extensions],
        "contraction_dims": [b.shape[1] for b in fl.contractions],
        "lambda": [_coeffs(x) for x in res.lam],
        "frame_sign": res.frame.sign,
    }
    try:
        gf = generating_function(g, k=k)
        beta = gf.beta()
        out["beta"] = [_value(b, ring) for b in beta[: 2 * m - 1]]
        out["beta_degree"] = gf.degree
    except MathError as exc:
        out["beta"] = []
        out["beta_error"] = str(exc)
    return out


def _write(cfg, name, text):
    if cfg.out is None:
        sys.stdout.write(text)
        return None
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["%.17g" % v if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_analyze(cfg):
    c = _curve(cfg)
    order = _analysis_order(cfg, c)
    if cfg.grid is None:
        report = analyze_graph(c.graph(cfg.ring, order))
        _write(cfg, "analyze.json", dumps(report))
        return EXIT_OK
    if cfg.ring == "rational":
        raise SpecError("grid analysis runs on the float ring")
    m = c.m
    header = ["t", "k"] + [f"lambda_{i + 1}" for i in range(m)] + [f"beta_{i}" for i in range(2 * m - 1)]
    rows = []
    for t in _grid(cfg, c.base):
        g = to_graph(c.source.at(t, order, "float"))
        r = analyze_graph(g)
        beta = r["beta"] + [float("nan")] * (2 * m - 1 - len(r["beta"]))
        rows.append([t, r["k"]] + [float(x[0]) for x in r["lambda"]] + [float(b) for b in beta])
    _write(cfg, "analyze.csv", _csv(header, rows))
    return EXIT_OK


def cmd_invariants(cfg):
    c = _curve(cfg)
    order = _analysis_order(cfg, c)
    g = c.graph(cfg.ring, order)
    r = analyze_graph(g)
    prop1 = None
    if not isinstance(c.source, _CoefficientGraph) or c.source.chart == ():
        prop1 = trace_asymptotic_check(c.source, float(c.base), window=0.3, n=10).max_residual
    estimates = []
    if cfg.probe:
        values = [get_ring(cfg.ring).coerce(v) if cfg.ring == "rational" else float(v) for v in cfg.probe]
        for est in probe_lambda_beta(c.m, values, ring=cfg.ring):
            estimates.append(est.to_dict())
    report = {
        "t": r["t"],
        "k": r["k"],
        "beta": r["beta"],
        "lambda": r["lambda"],
        "prop1_residual": prop1,
        "estimates": estimates,
    }
    _write(cfg, "invariants.json", dumps(report))
    return EXIT_OK


def cmd_crossratio(cfg):
    c = _curve(cfg)
    base = float(c.base)
    # g is summed as a series in t0 - t1, so use a long jet unless told otherwise
    order = cfg.order if cfg.order is not None else 2 * c.m * c.m + 26
    g1 = to_graph(c.source.at(base, order, "float"))
    k = weight(g1)
    gf = generating_function(g1, k=k)
    beta = np.array([float(b) for b in gf.beta()])
    rows = []
    grid = _grid(cfg, base) if cfg.grid else [base + d for d in np.linspace(-0.3, 0.3, 13)]
    for t0 in grid:
        if abs(t0 - base) < 1e-12:
            continue
        g0 = to_graph(c.source.at(t0, 1, "float"))
        s0 = np.asarray(g0.S.coeffs, dtype=float)
        s1 = np.asarray(g1.S.coeffs, dtype=float)
        m = c.m
        l0 = np.vstack([np.eye(m), s0[0]])
        l1 = np.vstack([np.eye(m), s1[0]])
        if g0.chart != g1.chart:
            raise SpecError("the curve changes chart on this grid; narrow the range")
        tr = float(cross_ratio(l0, s0[1], l1, s1[1]).trace)
        delta = t0 - base
        resid = tr + k / delta**2 + float(np.polyval(beta[::-1], delta))
        rows.append([t0, base, tr, resid])
    _write(cfg, "crossratio.csv", _csv(["t0", "t1", "trace", "residual"], rows))
    return EXIT_OK


def _spec_from_config(cfg):
    if cfg.rho:
        doc = {"representation": "lambda", "entries": cfg.rho}
    elif cfg.spec is not None:
        doc = cfg.spec
    else:
        if cfg.m is None:
            raise SpecError("roundtrip needs --spec, --rho or --m")
        return random_polynomial_spec(cfg.m, np.random.default_rng(cfg.seed)), 0
    c = load_curve(doc, cfg.ring)
    if c.spec is None:
        raise SpecError("this command needs a curvature spec (representation 'lambda')")
    if cfg.m is not None and cfg.m != c.m:
        raise SpecError(f"--m {cfg.m} does not match the spec (m = {c.m})")
    return c.spec, c.base


def cmd_roundtrip(cfg):
    spec, base = _spec_from_config(cfg)
    ring = get_ring(cfg.ring)
    t0 = ring.coerce(Fraction(base)) if ring.exact else float(base)
    rep = roundtrip(spec, t0, cfg.order, ring)
    report = {
        "m": rep.m,
        "ring": rep.ring,
        "rho": spec.texts(),
        "sign": spec.sign,
        "order": rep.order,
        "requested_order": rep.requested_order,
        "compared_order": rep.compared_order,
        "complete": rep.complete,
        "lambda_discrepancy": rep.lam_discrepancy,
        "frame_discrepancy": rep.frame_discrepancy,
        "frame_sign": rep.frame_sign,
        "lambda": [_coeffs(x.truncate(rep.compared_order)) for x in rep.lam],
    }
    _write(cfg, "roundtrip.json", dumps(report))
    tol = 0 if ring.exact else 1e-6
    if rep.lam_discrepancy > tol or rep.frame_discrepancy > (0 if ring.exact else 1e-6):
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_synth(cfg):
    spec, base = _spec_from_config(cfg)
    m = spec.m
    ring = get_ring(cfg.ring)
    a = float(base)
    grid = cfg.grid if cfg.grid else (a, a + 1.0)
    if abs(grid[0] - a) > 1e-15:
        raise SpecError(f"the grid must start at the spec's base point {a}")
    res = synthesize_interval(spec, grid[0], grid[1], cfg.step)
    header = ["t", "chart"]
    header += [f"E{j + 1}_{r}" for j in range(m) for r in range(2 * m)]
    header += [f"F{j + 1}_{r}" for j in range(m) for r in range(2 * m)]
    header += [f"S_{i + 1}{j + 1}" for i in range(m) for j in range(i, m)]
    rows = []
    for t, phi, s, ch in zip(res.t, res.frames, res.S, res.charts):
        row = [float(t), " ".join(str(x) for x in ch) or "-"]
        row += [float(phi[r, j]) for j in range(2 * m) for r in range(2 * m)]
        row += [float(s[i, j]) for i in range(m) for j in range(i, m)]
        rows.append(row)
    order = 2 * m * m + 2 * m + 2 if cfg.order is None else cfg.order

    t0 = ring.coerce(Fraction(base)) if ring.exact else float(base)
    local = synthesize_local(spec, t0, order, ring)
    g = graph_from_basis(local.frame.E)
    entries = [[[_scalar(v) if ring.exact else float(v) for v in g.S.coeffs[:, i, j]] for j in range(m)] for i in range(m)]
    report = {
        "m": m,
        "rho": spec.texts(),
        "sign": spec.sign,
        "ring": ring.name,
        "range": list(grid),
        "step": cfg.step,
        "darboux_residual": res.darboux_residual,
        "method": res.metadata.get("method"),
        "curve": {
            "m": m,
            "representation": "graph",
            "base": _scalar(t0) if ring.exact else float(t0),
            "order": g.order,
            "chart": list(g.chart),
            "entries": entries,
        },
    }
    _write(cfg, "synth.csv", _csv(header, rows))
    _write(cfg, "synth.json", dumps(report))
    return EXIT_OK


def cmd_selftest(cfg):
    from .acceptance import CRITERIA

    chosen = cfg.only or list(range(1, len(CRITERIA) + 1))
    bad = [n for n in chosen if not 1 <= n <= len(CRITERIA)]
    if bad:
        raise SpecError(f"no criterion numbered {bad[0]}")
    results = []
    for n in chosen:
        r = CRITERIA[n - 1](cfg.seed)
        print(r.line(), flush=True)
        results.append(r)
    if cfg.out is not None:
        _write(
            cfg,
            "selftest.json",
            dumps([{"criterion": r.number, "title": r.title, "ok": r.ok, "detail": r.detail} for r in results]),
        )
    return EXIT_OK if all(r.ok for r in results) else EXIT_TOLERANCE


HANDLERS = {
    "synth": cmd_synth,
    "analyze": cmd_analyze,
    "invariants": cmd_invariants,
    "crossratio": cmd_crossratio,
    "roundtrip": cmd_roundtrip,
    "selftest": cmd_selftest,
}


def run(cfg):
    """Execute a validated :class:`RunConfig`; returns the exit status."""
    return HANDLERS[cfg.command](cfg.validate())


def main(argv=None):
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ToleranceError as exc:
        print(f"tolerance breached: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except MathError as exc:
        print(f"math error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except LGIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

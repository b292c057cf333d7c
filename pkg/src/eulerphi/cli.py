"""Batch command-line front-end.

Commands map one-to-one onto library operations:

  constants        C(F), A1, A2 (plus L-values for Dirichlet kinds)
  table            coefficient/totient table construction with caching
  error-term       E(x) or E2(x) at a list of x values
  decompose        E2 = x f1 + g1/2 pointwise reports
  verify-identity  constant-free reduced identity, exact rationals
  volterra         equation residual / direct solve / homogeneity probe
  growth           |E(x)| / (x (log 2x)^d) scan
  series-check     sum phi(n) n^-s vs zeta(s-1) sum alpha(n) n^-s

Output is CSV (default) or JSON, deterministic for a fixed config: floats are
written with 17 significant digits, exact rationals as p/q strings, and no
timestamps are embedded.  A JSON config file may hold any long-option value
under its dest name; command-line flags win, unknown keys are rejected.
Tables are cached under EULERPHI_CACHE_DIR (or --cache-dir) keyed by spec
hash, size, and mode.

Exit codes: 0 all requested verifications passed; 1 a verification failed;
2 usage error; >= 10 one code per library error class (see EXIT_CODES).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from . import coeffs as _coeffs
from . import decomp as _decomp
from . import products as _products
from . import volterra as _volterra
from .errors import (
    AnchorOutOfRange,
    BadGrid,
    BadModulus,
    BadProductSpec,
    CacheMismatch,
    CutoffTooSmall,
    DegreeNotMinimal,
    EulerphiError,
    IoError,
    MBeyondTable,
    ModeUnavailable,
    MSmallerThanX,
    NonMultiplicative,
    NonPositiveX,
    NotHomogeneous,
    NotIntegrableNearZero,
    NotPrime,
    OutOfMemory,
    PrecisionUnreachable,
    PrincipalCharacter,
    RootOutOfDisk,
    SOutOfRange,
    UsageError,
    WrongSupport,
    XBelowN,
    XBelowOne,
    XBeyondGrid,
    XBeyondTable,
)

CACHE_ENV = "EULERPHI_CACHE_DIR"

EXIT_CODES = {
    UsageError: 2,
    BadModulus: 10,
    WrongSupport: 11,
    NonMultiplicative: 12,
    RootOutOfDisk: 14,
    DegreeNotMinimal: 15,
    BadProductSpec: 13,
    NotPrime: 16,
    CutoffTooSmall: 17,
    PrincipalCharacter: 18,
    PrecisionUnreachable: 19,
    ModeUnavailable: 20,
    SOutOfRange: 21,
    OutOfMemory: 22,
    XBeyondTable: 23,
    CacheMismatch: 24,
    MBeyondTable: 25,
    MSmallerThanX: 26,
    XBelowN: 27,
    XBelowOne: 28,
    NonPositiveX: 29,
    BadGrid: 30,
    AnchorOutOfRange: 31,
    NotIntegrableNearZero: 32,
    NotHomogeneous: 33,
    XBeyondGrid: 34,
    IoError: 35,
}


def exit_code_for(exc: EulerphiError) -> int:
    for klass in type(exc).__mro__:
        if klass in EXIT_CODES:
            return EXIT_CODES[klass]
    return 1


# ---------------------------------------------------------------------------
# RunConfig and parsing
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything one command run needs, after merging flags and config file."""

    command: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["options"][name]
        except KeyError:
            raise AttributeError(name)


_DEFAULTS = {
    "product": "zeta",
    "kronecker": None,
    "modulus": None,
    "values": None,
    "spec_file": None,
    "degree": None,
    "roots": None,
    "default": "zero",
    "mode": "auto",
    "n": None,
    "x": None,
    "s": 3.0,
    "X": 20.0,
    "h": 1e-3,
    "anchor": "1.5=auto",
    "A": 0.0,
    "op": "residual",
    "convention": "symmetric",
    "tolerance": 1e-5,
    "prime_cutoff": 10 ** 6,
    "a1_mode": "auto",
    "a1_cutoff": 10 ** 6,
    "m": None,
    "samples": 20,
    "x_min": 2,
    "limit": None,
    "output": None,
    "format": "csv",
    "cache_dir": None,
    "no_cache": False,
    "config": None,
}

_COMMANDS = ("constants", "table", "error-term", "decompose",
             "verify-identity", "volterra", "growth", "series-check")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="eulerphi",
        description="Euler totients of polynomial Euler products: error terms, "
                    "their decomposition, and Volterra-equation checks.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *, tables=True):
        g = p.add_argument_group("product")
        g.add_argument("--product", choices=("zeta", "dirichlet", "custom"))
        g.add_argument("--kronecker", type=int, metavar="D")
        g.add_argument("--modulus", type=int, metavar="Q")
        g.add_argument("--values", metavar="V0,V1,...")
        g.add_argument("--spec-file", metavar="PATH")
        g.add_argument("--degree", type=int)
        g.add_argument("--roots", metavar="JSON")
        g.add_argument("--default", choices=("zero", "one"))
        if tables:
            p.add_argument("--mode", choices=("auto", "exact", "float"))
            p.add_argument("--n", type=int, metavar="N")
            p.add_argument("--cache-dir", metavar="DIR")
            p.add_argument("--no-cache", action="store_true", default=None)
        p.add_argument("--prime-cutoff", type=int)
        p.add_argument("--a1-mode",
                       choices=("auto", "closed_form", "partial_sums"))
        p.add_argument("--a1-cutoff", type=int)
        p.add_argument("--output", metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--config", metavar="PATH")

    p = sub.add_parser("constants", help="C(F), A1, A2 and L-values")
    add_common(p, tables=False)

    p = sub.add_parser("table", help="build and export a totient table")
    add_common(p)
    p.add_argument("--limit", type=int, help="max rows to export")

    p = sub.add_parser("error-term", help="E(x) at given x values")
    add_common(p)
    p.add_argument("--x", metavar="LIST|A:B:STEP")
    p.add_argument("--convention", choices=("plain", "symmetric"))

    p = sub.add_parser("decompose", help="E2 = x f1 + g1/2 reports")
    add_common(p)
    p.add_argument("--x", metavar="LIST|A:B:STEP")

    p = sub.add_parser("verify-identity",
                       help="exact constant-free reduced identity")
    add_common(p)
    p.add_argument("--x", metavar="LIST|A:B:STEP")

    p = sub.add_parser("volterra", help="equation residual / solve / probe")
    add_common(p)
    p.add_argument("--op", choices=("residual", "solve", "probe"))
    p.add_argument("--X", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--anchor", metavar="X0=V|X0=auto")
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("growth", help="|E(x)|/(x (log 2x)^d) scan")
    add_common(p)
    p.add_argument("--X", type=float)
    p.add_argument("--x-min", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("series-check",
                       help="Dirichlet series identity at real s > 2")
    add_common(p)
    p.add_argument("--s", type=float)
    return top


def parse_config(argv) -> RunConfig:
    """argv -> RunConfig; a --config JSON file fills unset options."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    cli = {k: v for k, v in vars(ns).items() if k != "command"}
    opts = dict(_DEFAULTS)
    path = cli.get("config")
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                file_opts = json.load(fh)
        except OSError as e:
            raise IoError(f"cannot read config file {path}: {e}")
        except json.JSONDecodeError as e:
            raise UsageError(f"config file {path} is not valid JSON: {e}")
        if not isinstance(file_opts, dict):
            raise UsageError("config file must hold a JSON object")
        for k, v in file_opts.items():
            if k not in _DEFAULTS or k == "config":
                raise UsageError(f"unknown config key {k!r}")
            opts[k] = v
    for k, v in cli.items():
        if v is not None:
            opts[k] = v
    cfg = RunConfig(command=command, options=opts)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    o = cfg.options
    if o["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {o['format']!r}")
    if o["n"] is not None and o["n"] < 1:
        raise UsageError(f"--n must be >= 1, got {o['n']}")
    if cfg.command == "volterra" and not o["h"] > 0:
        raise UsageError(f"--h must be > 0, got {o['h']}")


# ---------------------------------------------------------------------------
# Value parsing helpers
# ---------------------------------------------------------------------------

def _parse_number(tok: str):
    tok = tok.strip()
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse number {tok!r}")


def parse_x_values(text: str, exact: bool) -> list:
    """LIST 'a,b,c' or RANGE 'a:b:step' (inclusive ends when step divides)."""
    if text is None:
        raise UsageError("--x is required for this command")
    if isinstance(text, (int, float)):
        text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be A:B:STEP, got {text!r}")
        a, b, step = (_parse_number(t) for t in parts)
        if step <= 0 or b < a:
            raise UsageError(f"range needs B >= A and STEP > 0, got {text!r}")
        out = []
        k = 0
        while True:
            v = a + k * step
            if v > b:
                break
            out.append(v)
            k += 1
    else:
        out = [_parse_number(t) for t in text.split(",") if t.strip()]
    if not out:
        raise UsageError(f"empty x list {text!r}")
    if exact:
        return out
    return [float(v) for v in out]


def parse_anchor(text: str) -> tuple:
    if "=" not in text:
        raise UsageError(f"--anchor must be X0=V or X0=auto, got {text!r}")
    left, right = text.split("=", 1)
    x0 = float(_parse_number(left))
    if right.strip() == "auto":
        return x0, "auto"
    return x0, float(_parse_number(right))


def _parse_char_values(text: str) -> list:
    return [v if v.denominator == 1 else v
            for v in (_parse_number(t) for t in text.split(","))]


# ---------------------------------------------------------------------------
# Spec / table / constants assembly
# ---------------------------------------------------------------------------

def build_spec(cfg: RunConfig) -> _products.EulerProductSpec:
    o = cfg.options
    if o["spec_file"]:
        try:
            return _products.load_spec_file(o["spec_file"])
        except OSError as e:
            raise IoError(f"cannot read spec file {o['spec_file']}: {e}")
    kind = o["product"]
    if kind == "zeta":
        return _products.zeta_product()
    if kind == "dirichlet":
        if o["kronecker"] is not None:
            chi = _products.build_character(kronecker=o["kronecker"])
        elif o["modulus"] is not None and o["values"] is not None:
            vals = [int(v) if isinstance(v, Fraction) and v.denominator == 1
                    else float(v) for v in _parse_char_values(o["values"])]
            chi = _products.build_character(q=o["modulus"], values=vals)
        else:
            raise UsageError("dirichlet product needs --kronecker or "
                             "--modulus plus --values")
        return _products.dirichlet_product(chi)
    if kind == "custom":
        if o["degree"] is None or o["roots"] is None:
            raise UsageError("custom product needs --degree and --roots")
        try:
            raw = json.loads(o["roots"]) if isinstance(o["roots"], str) else o["roots"]
        except json.JSONDecodeError as e:
            raise UsageError(f"--roots is not valid JSON: {e}")
        roots = {int(p): [_products._num_from_json(r) for r in rs]
                 for p, rs in raw.items()}
        return _products.custom_product(o["degree"], roots, o["default"])
    raise UsageError(f"unknown product {kind!r}")


def get_table(cfg: RunConfig, spec, n: int, mode: str) -> _coeffs.TotientTable:
    o = cfg.options
    cache_dir = o["cache_dir"] or os.environ.get(CACHE_ENV)
    use_cache = bool(cache_dir) and not o["no_cache"]
    mode = _coeffs._resolve_mode(spec, n, mode)
    if use_cache:
        path = _coeffs.cache_path(cache_dir, spec, n, mode)
        if os.path.exists(path):
            try:
                return _coeffs.load_table(path, spec, n, mode)
            except (CacheMismatch, OSError, ValueError, KeyError):
                pass  # stale or corrupt: rebuild below
    table = _coeffs.phi_table(spec, n, mode=mode)
    if use_cache:
        try:
            _coeffs.save_table(table, path)
        except OSError as e:
            raise IoError(f"cannot write cache file {path}: {e}")
    return table


def get_constants(cfg: RunConfig, spec, table=None) -> _products.Constants:
    o = cfg.options
    coeffs = None
    if (table is not None and not table.exact
            and table.N >= o["a1_cutoff"]):
        coeffs = table.coeffs
    return _products.compute_constants(
        spec, prime_cutoff=o["prime_cutoff"], a1_mode=o["a1_mode"],
        a1_cutoff=o["a1_cutoff"], coeffs=coeffs)


def _needed_n(cfg: RunConfig, xs) -> int:
    if cfg.options["n"] is not None:
        n = cfg.options["n"]
        top = max(xs)
        if top > n:
            raise UsageError(f"--x contains {top} beyond --n {n}")
        return n
    return max(1, int(math.floor(max(xs))))


def _meta(cfg: RunConfig, spec, mode: str) -> dict:
    return {"spec_hash": _products.spec_hash(spec), "version": __version__,
            "mode": mode, "command": cfg.command}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _vwb_row(name: str, v: _products.ValueWithBound) -> dict:
    return {"name": name, "value": v.value, "bound": v.bound,
            "bound_kind": v.bound_kind}


def cmd_constants(cfg: RunConfig):
    spec = build_spec(cfg)
    cons = get_constants(cfg, spec)
    rows = [_vwb_row("C_F", cons.c), _vwb_row("A1", cons.a1),
            _vwb_row("A2", cons.a2)]
    if spec.kind == "dirichlet" and not spec.character.is_principal:
        rows.append(_vwb_row("L1_chi", _products.l_value(spec.character, 1.0)))
        rows.append(_vwb_row("L2_chi", _products.l_value(spec.character, 2.0)))
    return {"meta": _meta(cfg, spec, "float"), "rows": rows}, True


def cmd_table(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    n = o["n"] or 1000
    table = get_table(cfg, spec, n, o["mode"])
    limit = min(o["limit"] or n, n)
    alpha = table.coeffs.alpha
    rows = [{"n": i, "alpha": alpha[i], "phi": table.phi[i],
             "cumulative": table.cumulative[i]}
            for i in range(1, limit + 1)]
    return {"meta": _meta(cfg, spec, table.mode), "rows": rows}, True


def cmd_error_term(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    exact_wanted = o["mode"] == "exact" or (
        o["mode"] == "auto" and spec.exact_capable)
    xs = parse_x_values(o["x"], exact_wanted)
    n = _needed_n(cfg, xs)
    table = get_table(cfg, spec, n, o["mode"])
    if not table.exact:
        xs = [float(v) for v in xs]
    cons = get_constants(cfg, spec, table)
    rows = []
    for x in xs:
        v = _coeffs.error_term(table, cons.c, x, convention=o["convention"])
        rows.append({"x": x, "value": v,
                     "bound": cons.c.bound * float(x) ** 2})
    return {"meta": _meta(cfg, spec, table.mode), "rows": rows}, True


def cmd_decompose(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    exact_wanted = o["mode"] == "exact" or (
        o["mode"] == "auto" and spec.exact_capable)
    xs = parse_x_values(o["x"], exact_wanted)
    n = _needed_n(cfg, xs)
    table = get_table(cfg, spec, n, o["mode"])
    if not table.exact:
        xs = [float(v) for v in xs]
    cons = get_constants(cfg, spec, table)
    rows = []
    ok = True
    for x in xs:
        rep = _decomp.decompose(x, table, cons)
        rows.append({"x": x, "E2": rep.e2.value,
                     "x_f1": rep.arithmetic_part.value,
                     "half_g1": rep.analytic_part.value,
                     "residual": rep.residual,
                     "exact_verdict": rep.exact_verdict})
        if rep.exact_verdict == "fail":
            ok = False
    return {"meta": _meta(cfg, spec, table.mode), "rows": rows}, ok


def cmd_verify_identity(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    if o["mode"] == "float":
        raise ModeUnavailable("verify-identity needs exact mode")
    xs = parse_x_values(o["x"], exact=True)
    n = _needed_n(cfg, xs)
    table = get_table(cfg, spec, n, "exact")
    results = _decomp.verify_identity_batch(xs, table)
    rows = [{"x": x, "verdict": "pass" if good else "fail", "residual": res}
            for x, good, res in results]
    ok = all(good for _, good, _ in results)
    return {"meta": _meta(cfg, spec, "exact"), "rows": rows}, ok


def cmd_volterra(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    X, h = float(o["X"]), float(o["h"])
    n = o["n"] or int(math.ceil(X))
    table = get_table(cfg, spec, n, "float")
    cons = get_constants(cfg, spec, table)
    e2p = _coeffs.make_e2(table, cons.c)
    tol = o["tolerance"]

    if o["op"] == "residual":
        fam = _volterra.solution_family(table, cons, o["A"])
        rep = _volterra.residual(fam, e2p, X, h)
        f1v = fam(rep.xs)
        e2v = e2p(rep.xs)
        rows = [{"x": x, "F1": f, "E2": e, "residual": r}
                for x, f, e, r in zip(rep.xs, f1v, e2v, rep.residuals)]
        summary = {"sup": rep.sup, "argmax": rep.argmax}
        data = {"meta": _meta(cfg, spec, "float"), "rows": rows,
                "summary": summary}
        return data, rep.sup <= tol

    x0, v0 = parse_anchor(o["anchor"])
    if not 0 < x0 <= X:
        raise AnchorOutOfRange(f"anchor x0 = {x0} outside (0, {X}]")
    if v0 == "auto":
        v0 = x0 * _decomp.f1_closed(x0, table, cons)
    sol = _volterra.solve_from_e2(e2p, X, h, (x0, v0))
    rep = _volterra.residual(sol, e2p, X, h)

    if o["op"] == "solve":
        e2v = e2p(sol.xs)
        rows = [{"x": x, "F1": f, "E2": e, "residual": r}
                for x, f, e, r in zip(sol.xs, sol.values, e2v, rep.residuals)]
        summary = {"sup": rep.sup, "argmax": rep.argmax,
                   "anchor_x0": x0, "anchor_value": v0}
        data = {"meta": _meta(cfg, spec, "float"), "rows": rows,
                "summary": summary}
        return data, rep.sup <= tol

    # probe: the solved function minus the base x f1(x) must be A x
    base = sol.xs * _decomp.f1_values(sol.xs, table, cons)
    diff = _volterra.GridFunction(xs=sol.xs, values=sol.values - base,
                                  X=X, h=h)
    a_fit, deviation = _volterra.homogeneous_probe(diff)
    rows = [{"A_fit": a_fit, "deviation": deviation,
             "anchor_x0": x0, "anchor_value": v0}]
    data = {"meta": _meta(cfg, spec, "float"), "rows": rows,
            "summary": {"sup": rep.sup, "argmax": rep.argmax}}
    return data, deviation <= max(tol, 10 * rep.sup * X)


def cmd_growth(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    X = int(o["X"])
    n = o["n"] or X
    if X > n:
        raise UsageError(f"--X {X} beyond --n {n}")
    table = get_table(cfg, spec, n, "float")
    cons = get_constants(cfg, spec, table)
    rep = _coeffs.growth_scan(table, cons.c, X, samples=o["samples"],
                              x_min=o["x_min"])
    rows = [{"x": x, "E": e, "ratio": r} for x, e, r in rep.rows]
    summary = {"sup": rep.sup, "argmax": rep.argmax}
    return {"meta": _meta(cfg, spec, "float"), "rows": rows,
            "summary": summary}, True


def cmd_series_check(cfg: RunConfig):
    o = cfg.options
    spec = build_spec(cfg)
    n = o["n"] or 10 ** 5
    table = get_table(cfg, spec, n, "float")
    rep = _coeffs.series_identity_check(spec, o["s"], n, table=table)
    rows = [{"s": rep.s, "N": rep.N, "lhs": rep.lhs, "rhs": rep.rhs,
             "diff": rep.diff, "bound": rep.bound,
             "bound_kind": rep.bound_kind, "ok": rep.ok}]
    return {"meta": _meta(cfg, spec, "float"), "rows": rows}, rep.ok


_RUNNERS = {
    "constants": cmd_constants,
    "table": cmd_table,
    "error-term": cmd_error_term,
    "decompose": cmd_decompose,
    "verify-identity": cmd_verify_identity,
    "volterra": cmd_volterra,
    "growth": cmd_growth,
    "series-check": cmd_series_check,
}


def run_command(cfg: RunConfig):
    """Dispatch; returns (report data, all-verifications-passed)."""
    return _RUNNERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def _fmt_csv(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if isinstance(v, (complex, np.complexfloating)):
        z = complex(v)
        return "%.17g%+.17gj" % (z.real, z.imag)
    return str(v)


def _json_ready(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (complex, np.complexfloating)):
        z = complex(v)
        return [z.real, z.imag]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, dict):
        return {k: _json_ready(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_ready(x) for x in v]
    return v


def emit_report(data: dict, format: str = "csv",
                path: Optional[str] = None) -> None:
    """Write {meta, rows[, summary]} as CSV (header row) or JSON."""
    buf = io.StringIO()
    if format == "json":
        json.dump(_json_ready(data), buf, indent=2)
        buf.write("\n")
    elif format == "csv":
        rows = data.get("rows", [])
        if rows:
            keys = list(rows[0].keys())
            buf.write(",".join(keys) + "\n")
            for row in rows:
                buf.write(",".join(_fmt_csv(row[k]) for k in keys) + "\n")
        summary = data.get("summary")
        if summary:
            buf.write("# " + " ".join(f"{k}={_fmt_csv(v)}"
                                      for k, v in summary.items()) + "\n")
    else:
        raise UsageError(f"format must be csv or json, got {format!r}")
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as e:
            raise IoError(f"cannot write report to {path}: {e}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        data, ok = run_command(cfg)
        emit_report(data, cfg.options["format"], cfg.options["output"])
    except EulerphiError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return exit_code_for(e)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

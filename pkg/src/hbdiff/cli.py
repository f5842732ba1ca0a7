"""Command-line front end.

Subcommands:

* ``ml``     -- tabulate the two-parameter Mittag-Leffler function.
* ``direct`` -- solve the forced initial-boundary-value problem from a
  spec file and write the solution grid, mode traces, and diagnostics.
* ``inverse`` -- recover a time-independent source from initial and final
  profiles and write the field, source, per-mode table, and diagnostics.
* ``verify`` -- run a named self-check suite and stream JSON-lines
  reports.

Spec files are INI-style::

    [operator]
    alpha = 0.6
    theta = 0.3

    [domain]
    T = 1.0
    K = 16
    nx = 128
    nt = 64

    [direct]
    psi = sin(pi*x)
    forcing = zero

    [inverse]
    psi = x*(1-x)
    phi = x*(1-x)

    [output]
    dir = out

Profile and forcing entries accept a restricted expression grammar
(numbers, ``x``, ``t``, ``pi``, ``sin``, ``+ - * / **``) or
``file:relative/path.csv`` pointing at a two-column x,value table.
Exit codes: 0 success, 2 usage or validation failure, 3 numerical
failure.  All emitted bytes are deterministic functions of the inputs.
"""

from __future__ import annotations

import argparse
import ast
import configparser
import json
import math
import os
import sys

import numpy as np

from .errors import IllPosedError, ValidationError
from .inverse import InverseProblemSpec, reconstruct_source_field, solve_inverse
from .operators import FracParams, SampledFunction, make_time_grid
from .special import MLParams, ml_two
from .spectral import (
    DirectProblemSpec,
    SeparableForcing,
    TensorForcing,
    sine_analyze,
    solve_direct,
)
from .verify import run_suite, suite_names

__all__ = ["main"]


def _fmt(v: float) -> str:
    """Shortest decimal text that round-trips to the same float."""
    v = float(v)
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


# ---------------------------------------------------------------------------
# restricted expression grammar

_ALLOWED_NAMES = {"x", "t", "pi"}
_ALLOWED_FUNCS = {"sin"}
_ALLOWED_BIN = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.USub, ast.UAdd)


def _validate_expr(node: ast.AST, used: set) -> None:
    if isinstance(node, ast.Expression):
        _validate_expr(node.body, used)
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ValueError(f"unsupported constant {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise ValueError(f"unknown name {node.id!r}; allowed: x, t, pi")
        if node.id != "pi":
            used.add(node.id)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BIN):
            raise ValueError("unsupported operator")
        _validate_expr(node.left, used)
        _validate_expr(node.right, used)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_UNARY):
            raise ValueError("unsupported unary operator")
        _validate_expr(node.operand, used)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_FUNCS):
            raise ValueError("only sin(...) calls are allowed")
        if len(node.args) != 1 or node.keywords:
            raise ValueError("sin takes exactly one positional argument")
        _validate_expr(node.args[0], used)
    else:
        raise ValueError(f"unsupported syntax ({type(node).__name__})")


class Expression:
    """Compiled restricted expression; knows which variables it uses."""

    def __init__(self, text: str):
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise ValueError(f"cannot parse expression {text!r}: {exc.msg}") from None
        self.used: set = set()
        _validate_expr(tree, self.used)
        self._code = compile(tree, "<spec>", "eval")
        self.text = text

    def __call__(self, x=None, t=None):
        env = {"__builtins__": {}, "pi": math.pi, "sin": np.sin}
        if x is not None:
            env["x"] = x
        if t is not None:
            env["t"] = t
        return eval(self._code, env)


def _load_samples(path: str) -> SampledFunction:
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.ndim != 2 or rows.shape[1] != 2:
        raise ValueError(f"sample file {path!r} must have two columns (x, value)")
    return SampledFunction(rows[:, 0], rows[:, 1])


def _profile(entry: str, xgrid: np.ndarray, base_dir: str) -> SampledFunction:
    """A spatial profile from an expression or a file: reference."""
    entry = entry.strip()
    if entry.startswith("file:"):
        f = _load_samples(os.path.join(base_dir, entry[5:].strip()))
        return SampledFunction(xgrid, np.interp(xgrid, f.grid, f.values))
    expr = Expression(entry)
    if "t" in expr.used:
        raise ValueError(f"profile expression {entry!r} must not involve t")
    vals = np.broadcast_to(np.asarray(expr(x=xgrid), dtype=float), xgrid.shape)
    return SampledFunction(xgrid, np.array(vals, dtype=float))


def _forcing(entry: str, xgrid: np.ndarray, tgrid: np.ndarray, base_dir: str):
    entry = entry.strip()
    if entry in ("", "zero", "0"):
        return None
    if entry.startswith("file:"):
        f = _load_samples(os.path.join(base_dir, entry[5:].strip()))
        return SeparableForcing(
            SampledFunction(xgrid, np.interp(xgrid, f.grid, f.values))
        )
    expr = Expression(entry)
    if "t" not in expr.used:
        vals = np.broadcast_to(np.asarray(expr(x=xgrid), dtype=float), xgrid.shape)
        return SeparableForcing(SampledFunction(xgrid, np.array(vals, dtype=float)))
    X = xgrid[None, :]
    T = tgrid[:, None]
    vals = np.asarray(expr(x=X, t=T), dtype=float)
    vals = np.broadcast_to(vals, (tgrid.size, xgrid.size))
    return TensorForcing(xgrid, tgrid, np.array(vals, dtype=float))


# ---------------------------------------------------------------------------
# spec files

def _read_spec(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    read = cp.read(path)
    if not read:
        raise ValueError(f"cannot read spec file {path!r}")
    return cp


def _operator_params(cp: configparser.ConfigParser) -> FracParams:
    if not cp.has_section("operator"):
        raise ValueError("spec file needs an [operator] section with alpha and theta")
    alpha = cp.getfloat("operator", "alpha")
    theta = cp.getfloat("operator", "theta", fallback=0.0)
    return FracParams(alpha, theta)


def _default_modes() -> int:
    env = os.environ.get("HB_DEFAULT_MODES")
    if env is None:
        return 64
    try:
        k = int(env)
    except ValueError:
        raise ValueError(f"HB_DEFAULT_MODES must be an integer, got {env!r}") from None
    return k


def _domain(cp: configparser.ConfigParser):
    horizon = cp.getfloat("domain", "T", fallback=1.0)
    if cp.has_option("domain", "K"):
        modes = cp.getint("domain", "K")
    else:
        modes = _default_modes()
    nx = cp.getint("domain", "nx", fallback=256)
    nt = cp.getint("domain", "nt", fallback=512)
    return horizon, modes, nx, nt


def _out_dir(cp: configparser.ConfigParser, spec_dir: str) -> str:
    fmt = cp.get("output", "format", fallback="csv").strip().lower()
    if fmt != "csv":
        raise ValueError(f"unsupported output format {fmt!r}; only csv is available")
    d = cp.get("output", "dir", fallback=".")
    path = os.path.join(spec_dir, d)
    os.makedirs(path, exist_ok=True)
    return path


def _write_grid(path: str, xgrid, tgrid, values) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("x\\t," + ",".join(_fmt(x) for x in xgrid) + "\n")
        for i, t in enumerate(tgrid):
            fh.write(_fmt(t) + "," + ",".join(_fmt(v) for v in values[i]) + "\n")


def _write_modes(path: str, tgrid, modes) -> None:
    K = modes.shape[0]
    with open(path, "w", newline="\n") as fh:
        fh.write("t," + ",".join(f"u_{k}" for k in range(1, K + 1)) + "\n")
        for i, t in enumerate(tgrid):
            fh.write(_fmt(t) + "," + ",".join(_fmt(modes[k, i]) for k in range(K)) + "\n")


def _write_jsonl(path: str, records) -> None:
    with open(path, "w", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_ml(args) -> int:
    if not args.z:
        print("ml: need at least one --z value", file=sys.stderr)
        return 2
    try:
        params = MLParams(args.alpha, args.beta)
        for z in args.z:
            print(f"{_fmt(z)}, {_fmt(ml_two(params, z))}")
    except (ValueError, OverflowError) as exc:
        print(f"ml: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_direct(args) -> int:
    cp = _read_spec(args.spec)
    spec_dir = os.path.dirname(os.path.abspath(args.spec))
    fp = _operator_params(cp)
    horizon, modes, nx, nt = _domain(cp)
    if not cp.has_section("direct"):
        raise ValueError("spec file needs a [direct] section with psi")
    xgrid = np.linspace(0.0, 1.0, nx + 1)
    tgrid = make_time_grid(horizon, nt, fp.rho)
    psi = _profile(cp.get("direct", "psi"), xgrid, spec_dir)
    forcing = _forcing(cp.get("direct", "forcing", fallback="zero"), xgrid, tgrid, spec_dir)
    spec = DirectProblemSpec(
        fp, psi, forcing, horizon=horizon, modes=modes, nx=nx, nt=nt
    )
    sol = solve_direct(spec)
    out = _out_dir(cp, spec_dir)
    _write_grid(os.path.join(out, "u_grid.csv"), sol.xgrid, sol.tgrid, sol.values)
    _write_modes(os.path.join(out, "mode_traces.csv"), sol.tgrid, sol.modes)
    _write_jsonl(
        os.path.join(out, "diagnostics.jsonl"),
        [
            {
                "record": "direct",
                "alpha": fp.alpha,
                "theta": fp.theta,
                "horizon": horizon,
                "modes": modes,
                "nx": nx,
                "nt": nt,
                "tail": sol.tail,
            }
        ],
    )
    return 0


def _cmd_inverse(args) -> int:
    cp = _read_spec(args.spec)
    spec_dir = os.path.dirname(os.path.abspath(args.spec))
    fp = _operator_params(cp)
    horizon, modes, nx, nt = _domain(cp)
    if not cp.has_section("inverse"):
        raise ValueError("spec file needs an [inverse] section with psi and phi")
    if cp.has_option("inverse", "T"):
        horizon = cp.getfloat("inverse", "T")
    xgrid = np.linspace(0.0, 1.0, nx + 1)
    psi = _profile(cp.get("inverse", "psi"), xgrid, spec_dir)
    phi = _profile(cp.get("inverse", "phi"), xgrid, spec_dir)
    spec = InverseProblemSpec(fp, psi, phi, horizon, modes=modes, nx=nx, nt=nt)
    res = solve_inverse(spec)
    out = _out_dir(cp, spec_dir)
    _write_grid(os.path.join(out, "u_grid.csv"), res.u.xgrid, res.u.tgrid, res.u.values)
    source = reconstruct_source_field(res, xgrid)
    with open(os.path.join(out, "source.csv"), "w", newline="\n") as fh:
        fh.write("x,f\n")
        for x, v in zip(source.grid, source.values):
            fh.write(f"{_fmt(x)},{_fmt(v)}\n")
    psi_c = sine_analyze(psi, modes).coeffs
    phi_c = sine_analyze(phi, modes).coeffs
    with open(os.path.join(out, "mode_table.csv"), "w", newline="\n") as fh:
        fh.write("k,psi,phi,transient,source\n")
        for k in range(modes):
            fh.write(
                f"{k + 1},{_fmt(psi_c[k])},{_fmt(phi_c[k])},"
                f"{_fmt(res.transient[k])},{_fmt(res.source.coeffs[k])}\n"
            )
    diag = {"record": "inverse", "alpha": fp.alpha, "theta": fp.theta, "horizon": horizon}
    diag.update(res.diagnostics)
    _write_jsonl(os.path.join(out, "diagnostics.jsonl"), [diag])
    return 0


def _cmd_verify(args) -> int:
    try:
        reports = run_suite(args.suite)
    except KeyError as exc:
        print(f"verify: {exc.args[0]}", file=sys.stderr)
        return 2
    ok = True
    for rep in reports:
        print(json.dumps(rep.as_dict(), sort_keys=True))
        ok = ok and rep.passed
    return 0 if ok else 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hbdiff",
        description="Fractional diffusion with a weighted time derivative: "
        "direct and inverse solvers, special-function tables, self checks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ml = sub.add_parser("ml", help="tabulate the Mittag-Leffler function")
    ml.add_argument("--alpha", type=float, required=True)
    ml.add_argument("--beta", type=float, default=1.0)
    ml.add_argument("--z", type=float, action="append", help="argument (repeatable)")
    ml.set_defaults(func=_cmd_ml)

    direct = sub.add_parser("direct", help="solve the direct problem from a spec file")
    direct.add_argument("spec", help="path to the INI spec file")
    direct.set_defaults(func=_cmd_direct)

    inverse = sub.add_parser("inverse", help="recover a source from a spec file")
    inverse.add_argument("spec", help="path to the INI spec file")
    inverse.set_defaults(func=_cmd_inverse)

    verify = sub.add_parser("verify", help="run a self-check suite")
    verify.add_argument("suite", help="suite name or 'all': " + ", ".join(suite_names()))
    verify.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError, configparser.Error, OSError) as exc:
        print(f"hbdiff {args.command}: {exc}", file=sys.stderr)
        return 2
    except (IllPosedError, RuntimeError, ArithmeticError) as exc:
        print(f"hbdiff {args.command}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

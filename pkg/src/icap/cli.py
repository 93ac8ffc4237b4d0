"""Command-line front end (``icap``).

Exit codes: 0 success, 1 the instance fails the requested regime (output
still carries the formula value, tagged), 2 malformed input. Errors go to
standard error as ``icap: error[Code]: message``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, capacity, matlib, regimes, verify
from .channel import instance_from_mapping, matrix_to_json, parse_matrix
from .errors import ICapError, InputError, ParseError
from .matlib import DEFAULT_TOL, ToleranceConfig

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"icap: error[Usage]: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-eig", type=_positive(float), help="eigenvalue floor (default %(default)s)",
                        default=None)
    common.add_argument("--tol-eq", type=_positive(float), default=None,
                        help="equality residual tolerance; env ICAP_TOL_EQ")
    common.add_argument("--radius-grid", type=_positive(int), default=None, help="angles in the radius sweep")
    common.add_argument("--units", choices=("nats", "bits"), default="nats")
    common.add_argument("--output", choices=("json", "table"), default="table")

    p = _Parser(prog="icap", description="Capacity regimes of two-user MIMO Gaussian interference channels.")
    p.add_argument("--version", action="version", version=f"icap {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="evaluate all regime conditions")
    c.add_argument("instance")
    c.add_argument("--offset-b", metavar="PATH", help="JSON object with B1 and/or B2 overrides")

    r = sub.add_parser("region", parents=[common], help="capacity region of a strong-interference instance")
    r.add_argument("instance")
    r.add_argument("--regime", choices=("auto", "very-strong", "aligned-strong"), default="auto")
    r.add_argument("--offset-b", metavar="PATH")
    r.add_argument("--csv", action="store_true", help="emit the vertex polyline as CSV")

    s = sub.add_parser("sumrate", parents=[common], help="sum-rate capacity (noisy or mixed interference)")
    s.add_argument("instance")
    s.add_argument("--regime", choices=("auto", "noisy", "mixed"), default="auto")
    s.add_argument("--offset-b", metavar="PATH")

    q = sub.add_parser("riccati", parents=[common], help="noisy-interference certificate")
    q.add_argument("instance", help="instance document, or an object with A1 and A2")
    q.add_argument("--offset-b", metavar="PATH")

    n = sub.add_parser("radius", parents=[common], help="numerical radius of a square matrix")
    n.add_argument("--matrix", required=True, metavar="PATH",
                   help="array of rows, or an object with key X")

    e = sub.add_parser("example", parents=[common], help="reproduce a published example")
    e.add_argument("id", type=int, choices=range(1, 6), metavar="N")
    e.add_argument("--fixtures", metavar="DIR", help="directory holding exN.json (default: bundled)")

    v = sub.add_parser("verify-all", parents=[common], help="all examples and oracle suites")
    v.add_argument("--report", default="verify-report.json", metavar="PATH")
    v.add_argument("--examples-only", action="store_true")
    v.add_argument("--fixtures", metavar="DIR")
    return p


def tolerance_from(args) -> ToleranceConfig:
    kw = {}
    env = os.environ.get("ICAP_TOL_EQ")
    if env:
        try:
            kw["eq_tol"] = float(env)
        except ValueError:
            raise ParseError(f"ICAP_TOL_EQ is not a number: {env!r}") from None
    if args.tol_eq is not None:
        kw["eq_tol"] = args.tol_eq
    if args.tol_eig is not None:
        kw["eig_floor"] = args.tol_eig
    if args.radius_grid is not None:
        kw["radius_grid"] = args.radius_grid
    try:
        return DEFAULT_TOL.with_overrides(**kw)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None


def _offsets(args):
    if not getattr(args, "offset_b", None):
        return None
    doc = _read_json(args.offset_b)
    if not isinstance(doc, dict) or not set(doc) <= {"B1", "B2"} or not doc:
        raise ParseError("offset file must be an object with keys B1 and/or B2")
    return {k: parse_matrix(v, k) for k, v in doc.items()}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)


def _fmt(x, units="nats"):
    if isinstance(x, float) and np.isfinite(x):
        return f"{x / capacity.LOG2 if units == 'bits' else x:.6f}"
    return str(x)


# ------------------------------------------------------------------ render

def render_region(region: capacity.RateRegion, fmt: str = "table", units: str = "nats") -> str:
    """Table, JSON or CSV (vertex polyline) text for a region."""
    if units == "bits":
        region = region.scaled(1.0 / capacity.LOG2)
    if fmt == "json":
        out = region.to_mapping()
        out["units"] = units
        if not region.proven:
            out["tag"] = "formula value, not proven capacity"
        return _dump(out)
    if fmt == "csv":
        rows = ["R1,R2"] + [f"{a!r},{b!r}" for a, b in region.vertices]
        return "\n".join(rows)
    lines = [f"{region.formula} ({units})" + ("" if region.proven else "  [formula value, not proven capacity]")]
    lines.append("bounds:")
    for b in region.bounds:
        lines.append(f"  {b.label:<8} <= {b.limit:.6f}")
    lines.append("vertices:")
    for a, c in region.vertices:
        lines.append(f"  ({a:.6f}, {c:.6f})")
    return "\n".join(lines)


def _classify_table(rep: regimes.RegimeReport) -> str:
    lines = [f"instance: {rep.label or '-'}", f"{'regime':<16}{'status':<40}{'margin':>12}"]
    for r, v in rep.verdicts.items():
        m = "" if np.isnan(v.margin) else f"{v.margin:.6g}"
        lines.append(f"{r.value:<16}{v.status.value:<40}{m:>12}")
    sat = ", ".join(r.value for r in rep.satisfied()) or "none"
    lines.append(f"satisfied: {sat}")
    return "\n".join(lines)


def _result_table(res: capacity.CapacityResult, units: str) -> str:
    f = 1.0 / capacity.LOG2 if units == "bits" else 1.0
    lines = [f"{res.formula.value}: {res.value * f:.6f} {units}"
             + ("" if res.proven else "  [formula value, not proven capacity]")]
    for k, v in res.components.items():
        lines.append(f"  {k:<16}{v * f:.6f}")
    for k, v in res.branches.items():
        lines.append(f"  branch {k:<16}{v * f:.6f}")
    return "\n".join(lines)


# ---------------------------------------------------------------- commands

def _instance(args, tol):
    return instance_from_mapping(_read_json(args.instance), tol)


def cmd_classify(args, tol):
    inst = _instance(args, tol)
    rep = regimes.classify(inst, _offsets(args), tol)
    text = _dump(rep.to_mapping()) if args.output == "json" else _classify_table(rep)
    return text, EXIT_OK


def cmd_region(args, tol):
    inst = _instance(args, tol)
    offs = _offsets(args)
    vs = regimes.check_very_strong(inst, tol)
    al = regimes.check_aligned_strong(inst, offs, tol)
    if args.regime == "very-strong" or (args.regime == "auto" and vs.satisfied):
        region = capacity.very_strong_region(inst, vs, tol)
    else:
        region = capacity.aligned_strong_region(inst, al, tol)
    fmt = "csv" if args.csv else args.output
    return render_region(region, fmt, args.units), EXIT_OK if region.proven else EXIT_DOMAIN


def cmd_sumrate(args, tol):
    inst = _instance(args, tol)
    offs = _offsets(args) or {}
    if args.regime in ("auto", "noisy"):
        zic = regimes.is_zic(inst)
        if zic == 3:
            v = regimes.check_noisy_zic(inst, offs.get("B2"), tol)
        elif zic == 2:
            v = regimes.check_noisy_zic(inst.swap_users(), offs.get("B1"), tol)
        else:
            v = regimes.check_noisy_two_sided(inst, offs.get("B1"), offs.get("B2"), tol)
        res = capacity.noisy_sum_capacity(inst, v, tol)
        if args.regime == "auto" and not res.proven:
            mixed = capacity.mixed_sum_capacity(inst, regimes.check_mixed(inst, offs, tol), tol)
            if mixed.proven:
                res = mixed
    else:
        res = capacity.mixed_sum_capacity(inst, regimes.check_mixed(inst, offs, tol), tol)
    text = _dump(res.to_mapping(args.units)) if args.output == "json" else _result_table(res, args.units)
    return text, EXIT_OK if res.proven else EXIT_DOMAIN


def cmd_riccati(args, tol):
    doc = _read_json(args.instance)
    if isinstance(doc, dict) and "A1" in doc and "A2" in doc and "H1" not in doc:
        A1, A2 = parse_matrix(doc["A1"], "A1"), parse_matrix(doc["A2"], "A2")
        test = regimes.riccati_feasible(A1, A2, tol)
        out = {"A1": matrix_to_json(A1), "A2": matrix_to_json(A2), "feasible": test.feasible,
               "radius1": regimes._num(test.radius1), "radius2": regimes._num(test.radius2)}
        if test.feasible:
            try:
                S1, S2 = regimes.riccati_solve(A1, A2, tol)
                out.update(Sigma1=matrix_to_json(S1), Sigma2=matrix_to_json(S2))
            except ICapError as exc:
                out["note"] = str(exc)
        feasible = test.feasible
    else:
        inst = instance_from_mapping(doc, tol)
        offs = _offsets(args) or {}
        v = regimes.check_noisy_two_sided(inst, offs.get("B1"), offs.get("B2"), tol)
        out = {"status": v.status.value, "margin": regimes._num(v.margin)}
        if v.witness is not None:
            out.update(v.witness.to_mapping())
        elif v.note:
            out["note"] = v.note
        feasible = v.satisfied
    if args.output == "json":
        text = _dump(out)
    else:
        lines = [f"feasible: {feasible}"]
        lines += [f"{k}: {out[k]}" for k in ("radius1", "radius2", "offset_rule", "status", "note") if k in out]
        text = "\n".join(lines)
    return text, EXIT_OK if feasible else EXIT_DOMAIN


def cmd_radius(args, tol):
    doc = _read_json(args.matrix)
    if isinstance(doc, dict):
        if "X" not in doc:
            raise ParseError("matrix object needs key X")
        doc = doc["X"]
    X = parse_matrix(doc, "X")
    est = matlib.numerical_radius_detail(X, tol)
    out = {"radius": est.value, "theta": est.theta, "bracket": est.bracket}
    text = _dump(out) if args.output == "json" else f"radius: {est.value:.12g} (theta {est.theta:.6f}, bracket {est.bracket:.1e})"
    return text, EXIT_OK


def cmd_example(args, tol):
    rep = verify.run_example(args.id, args.fixtures, tol)
    text = _dump(rep.to_mapping()) if args.output == "json" else rep.table()
    return text, EXIT_OK if rep.passed else EXIT_DOMAIN


def cmd_verify_all(args, tol):
    report = verify.verify_all(tol, args.fixtures, suites=not args.examples_only)
    verify.write_report(report, args.report)
    text = _dump(report) if args.output == "json" else verify.render_report(report)
    return text, EXIT_OK if report["pass"] else EXIT_DOMAIN


COMMANDS = {
    "classify": cmd_classify,
    "region": cmd_region,
    "sumrate": cmd_sumrate,
    "riccati": cmd_riccati,
    "radius": cmd_radius,
    "example": cmd_example,
    "verify-all": cmd_verify_all,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = tolerance_from(args)
        text, code = COMMANDS[args.command](args, tol)
    except ICapError as exc:
        sys.stderr.write(f"icap: error[{exc.code}]: {exc}\n")
        return EXIT_INPUT if isinstance(exc, (InputError, FileNotFoundError)) else EXIT_DOMAIN
    sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

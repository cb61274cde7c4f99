"""Command-line front end.

    whittaker eval padic --lambda '[1,0]' --alpha '["1/2","3"]'
    whittaker eval spherical-c --nu '[0,0]' --a '[1]'
    whittaker verify barnes --cases 20
    whittaker table spherical-c --nu '[0,0]' --a1 logspace:0.1:10:50

Exit codes: 0 success, 1 a verified identity failed, 2 bad input,
3 numerical failure.  Errors are printed as {"error": kind, "detail": ...}.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import arch_whittaker as aw
from . import asai_zeta as az
from . import padic_whittaker as pw
from . import suites
from .errors import NumericalError, WhittakerError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    kind = "UsageError"


@dataclass(frozen=True)
class RunConfig:
    """Run settings; None for an MB or window setting means automatic."""

    tolerance: float = 1e-8
    mb_height: float | None = None
    mb_step: float | None = None
    quad_window: float | None = None
    threads: int = 1
    output_format: str = "json"

    def __post_init__(self):
        for name in ("tolerance", "mb_height", "mb_step", "quad_window"):
            v = getattr(self, name)
            if name != "tolerance" and v is None:
                continue
            if isinstance(v, bool) or not (isinstance(v, (int, float)) and v > 0):
                raise UsageError(f"{name} must be a positive number")
        if not (isinstance(self.threads, int) and self.threads >= 1):
            raise UsageError("threads must be an integer >= 1")
        if self.output_format not in ("json", "csv"):
            raise UsageError("output_format must be json or csv")


# --------------------------------------------------------------------------
# parsing helpers


def _json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: not valid JSON ({exc.msg})") from None


def _complex(x, what: str) -> complex:
    if isinstance(x, bool):
        raise UsageError(f"{what}: booleans are not numbers")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, dict) and set(x) <= {"re", "im"}:
        return complex(float(x.get("re", 0.0)), float(x.get("im", 0.0)))
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", "").replace("i", "j"))
        except ValueError:
            pass
    raise UsageError(f"{what}: cannot read {x!r} as a complex number")


def _scalar(text: str, what: str) -> complex:
    # bare strings such as 0.3+0.1i are accepted alongside JSON
    try:
        v = json.loads(text)
    except json.JSONDecodeError:
        v = text
    return _complex(v, what)


def _complex_list(text: str, what: str) -> list:
    v = _json(text, what)
    if not isinstance(v, list):
        raise UsageError(f"{what}: expected a JSON array")
    return [_complex(x, what) for x in v]


def _real_list(text: str, what: str) -> list:
    v = _json(text, what)
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (int, float))
                                      for x in v):
        raise UsageError(f"{what}: expected a JSON array of real numbers")
    return [float(x) for x in v]


def _int_list(text: str, what: str) -> list:
    v = _json(text, what)
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
        raise UsageError(f"{what}: expected a JSON array of integers")
    return v


def _axis(text: str, what: str) -> list:
    """A grid axis: a number, a JSON array, or lin/logspace:lo:hi:num."""
    if text.startswith(("logspace:", "linspace:")):
        kind, *rest = text.split(":")
        try:
            lo, hi, num = float(rest[0]), float(rest[1]), int(rest[2])
        except (ValueError, IndexError):
            raise UsageError(f"{what}: expected {kind}:lo:hi:num") from None
        if num < 0 or (kind == "logspace" and not (lo > 0 and hi > 0)):
            raise UsageError(f"{what}: invalid {kind} range")
        pts = np.geomspace(lo, hi, num) if kind == "logspace" else np.linspace(lo, hi, num)
        return [float(x) for x in pts]
    v = _json(text, what)
    if isinstance(v, list):
        return [float(x) for x in v]
    return [float(v)]


def encode(x):
    """JSON-ready value; floats keep full repr precision, complex as {re, im}."""
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (list, tuple)):
        return [encode(y) for y in x]
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    return x


def _dump(doc) -> str:
    return json.dumps(encode(doc), sort_keys=False)


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# eval


def _eval_padic(args, cfg):
    lam = _int_list(args.lam, "--lambda")
    alpha = _json(args.alpha, "--alpha")
    if not isinstance(alpha, list):
        raise UsageError("--alpha: expected a JSON array")
    alpha = [str(a) if isinstance(a, int) and not isinstance(a, bool) else a for a in alpha]
    if any(not isinstance(a, str) for a in alpha):
        raise UsageError("--alpha: entries must be strings like \"1/2\" or integers")
    n = args.n if args.n is not None else len(lam)
    hv = pw.shintani_value(lam, alpha, n)
    doc = hv.to_json()
    doc.update({"error_estimate": 0.0,
                "params_echo": {"lambda": list(lam), "alpha": alpha, "n": n}})
    return doc


def _eval_spherical(args, cfg):
    nu = _complex_list(args.nu, "--nu")
    a = _real_list(args.a, "--a")
    if args.n is not None and args.n != len(nu):
        raise UsageError("--n does not match the length of --nu")
    res = aw.evaluate_spherical(aw.SphericalParamsC(nu), aw.TorusPointC(a),
                                tol=args.mb_tol, step=cfg.mb_step, height=cfg.mb_height)
    return {"value": res.value, "error_estimate": res.error_estimate,
            "params_echo": {"n": len(nu), "nu": nu, "a": a}}


def _eval_minimal(args, cfg):
    nu = _complex_list(args.nu, "--nu")
    a = _real_list(args.a, "--a")
    p = aw.MinimalTypeParamsC(nu, args.kappa)
    ell = _int_list(args.ell, "--ell") if args.ell else [0] * (len(nu) - 1) + [args.kappa]
    w = aw.WeightIndexC(ell)
    if args.method == "direct":
        res = aw.evaluate_direct(p, w, aw.TorusPointC(a))
    else:
        res = aw.evaluate_minimal(p, w, aw.TorusPointC(a), tol=args.mb_tol,
                                  step=cfg.mb_step, height=cfg.mb_height)
    return {"value": res.value, "error_estimate": res.error_estimate,
            "params_echo": {"nu": nu, "kappa": args.kappa, "ell": ell, "a": a,
                            "method": args.method}}


def _eval_gl3r(args, cfg):
    p = aw.MiyazakiParams(args.kappa, _scalar(args.w, "--w"))
    fn = aw.miyazaki_direct if args.method == "direct" else aw.miyazaki_mb
    out = fn(p, args.a1, args.a2, with_error=True)
    value = {",".join(map(str, k)): v.value for k, v in out.items()}
    err = {",".join(map(str, k)): v.error_estimate for k, v in out.items()}
    return {"value": value, "error_estimate": err,
            "params_echo": {"kappa": p.kappa, "w": p.w, "a1": args.a1, "a2": args.a2,
                            "method": args.method}}


def _eval_asai(args, cfg):
    nu = _complex_list(args.nu, "--nu")
    s = _scalar(args.s, "--s")
    inp = az.AsaiInput(nu, args.kappa, s)
    doc = {"value": az.asai_l_factor(inp).evaluate(s), "error_estimate": 0.0}
    if args.zeta:
        doc["zeta_closed_form"] = az.asai_rhs(inp)
    doc["params_echo"] = {"nu": nu, "kappa": args.kappa, "s": s}
    return doc


EVALS = {"padic": _eval_padic, "spherical-c": _eval_spherical, "minimal-c": _eval_minimal,
         "gl3r": _eval_gl3r, "asai-l": _eval_asai}


def cmd_eval(args, cfg) -> tuple:
    doc = EVALS[args.target](args, cfg)
    if cfg.output_format == "csv":
        flat = {k: v for k, v in encode(doc).items() if k != "params_echo"}
        header = list(flat)
        return _csv(header, [[json.dumps(flat[h]) if isinstance(flat[h], (dict, list))
                              else flat[h] for h in header]]), EXIT_OK
    return _dump(doc) + "\n", EXIT_OK


# --------------------------------------------------------------------------
# verify


def cmd_verify(args, cfg) -> tuple:
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    tol = args.tol  # None keeps each suite's own acceptance tolerance
    reports = []
    for name in names:
        mb = {}
        if name == "asai":
            mb = {"window": cfg.quad_window, "mb_step": cfg.mb_step, "mb_height": cfg.mb_height}
        reports.append(suites.run_suite(name, tol=tol, threads=cfg.threads, cases=args.cases,
                                        n=args.n, seed=args.seed, **mb))
    ok = all(r.passed for r in reports)
    if cfg.output_format == "csv":
        rows = []
        for r in reports:
            for row in r.rows:
                lhs, rhs = row["lhs"], row["rhs"]
                rows.append([r.name, row["case"], _part(lhs, "real"), _part(lhs, "imag"),
                             _part(rhs, "real"), _part(rhs, "imag"), row["rel_err"],
                             "pass" if row["pass"] else "FAIL"])
        text = _csv(["suite", "case", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err", "pass"],
                    rows)
    else:
        text = _dump({"passed": ok, "suites": [
            {"suite": r.name, "passed": r.passed, "max_rel_err": r.max_rel_err,
             "cases": len(r.rows), "rows": r.rows} for r in reports]}) + "\n"
    return text, EXIT_OK if ok else EXIT_FAIL


def _part(x, which):
    if isinstance(x, str):
        return x
    return float(getattr(complex(x), which))


# --------------------------------------------------------------------------
# table


def cmd_table(args, cfg) -> tuple:
    fn = args.function
    a1 = _axis(args.a1, "--a1") if args.a1 is not None else None
    a2 = _axis(args.a2, "--a2") if args.a2 is not None else None
    if fn == "asai-l":
        nu = _complex_list(args.nu, "--nu")
        ss = _axis(args.s, "--s") if args.s is not None else []
        points = [(s,) for s in ss]
        header = ["s"]

        def value(pt):
            return az.asai_l_factor(az.AsaiInput(nu, args.kappa, pt[0])).evaluate(pt[0]), 0.0
    else:
        nu = _complex_list(args.nu, "--nu")
        n = len(nu)
        if a1 is None:
            raise UsageError("--a1 is required")
        if n == 2:
            points = [(x,) for x in a1]
            header = ["a1"]
        elif n == 3:
            if a2 is None:
                raise UsageError("--a2 is required for n = 3")
            points = [(x, y) for x in a1 for y in a2]
            header = ["a1", "a2"]
        else:
            raise UsageError("tables are available for n in {2, 3}")
        if fn == "spherical-c":
            params = aw.SphericalParamsC(nu)

            def value(pt):
                r = aw.evaluate_spherical(params, aw.TorusPointC(pt), step=cfg.mb_step,
                                          height=cfg.mb_height)
                return r.value, r.error_estimate
        else:
            params = aw.MinimalTypeParamsC(nu, args.kappa)
            ell = aw.WeightIndexC(_int_list(args.ell, "--ell") if args.ell
                                  else [0] * (n - 1) + [args.kappa])

            def value(pt):
                r = aw.evaluate_minimal(params, ell, aw.TorusPointC(pt), step=cfg.mb_step,
                                        height=cfg.mb_height)
                return r.value, r.error_estimate
    results = suites.ordered_map(value, points, cfg.threads)
    rows = [list(pt) + [complex(v).real, complex(v).imag, float(e)]
            for pt, (v, e) in zip(points, results)]
    header = header + ["value_re", "value_im", "error_estimate"]
    if cfg.output_format == "json":
        return _dump([dict(zip(header, r)) for r in rows]) + "\n", EXIT_OK
    return _csv(header, rows), EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, help="tolerance (verify: pass threshold)")
    p.add_argument("--mb-height", type=float, help="contour truncation height")
    p.add_argument("--mb-step", type=float, help="contour quadrature step")
    p.add_argument("--quad-window", type=float, help="log-window for Mellin quadrature")
    p.add_argument("--threads", type=int, help="worker threads (default $WHITTAKER_THREADS or 1)")
    p.add_argument("--format", choices=("json", "csv"), help="output format")
    p.add_argument("--config", help="JSON file with RunConfig fields")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="whittaker", description="Whittaker functions on GL_n over local fields")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    ev = sub.add_parser("eval", help="evaluate one function")
    esub = ev.add_subparsers(dest="target", parser_class=_Parser)
    esub.required = True
    p = esub.add_parser("padic", help="Shintani's formula (exact)")
    p.add_argument("--lambda", dest="lam", required=True, help="dominant weight, JSON ints")
    p.add_argument("--alpha", required=True, help='Satake parameters, JSON strings like "1/2"')
    p.add_argument("--n", type=int)
    _common(p)
    p = esub.add_parser("spherical-c", help="spherical Whittaker function on GL_n(C)")
    p.add_argument("--n", type=int)
    p.add_argument("--nu", required=True)
    p.add_argument("--a", required=True)
    _common(p)
    p = esub.add_parser("minimal-c", help="minimal K-type Whittaker function on GL_n(C)")
    p.add_argument("--nu", required=True)
    p.add_argument("--kappa", type=int, default=0)
    p.add_argument("--ell", help="weight index, JSON ints (default (0,..,0,kappa))")
    p.add_argument("--a", required=True)
    p.add_argument("--method", choices=("mb", "direct"), default="mb")
    _common(p)
    p = esub.add_parser("gl3r", help="GL_3(R) monomial coefficients")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--w", default="0")
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--a2", type=float, required=True)
    p.add_argument("--method", choices=("mb", "direct"), default="mb")
    _common(p)
    p = esub.add_parser("asai-l", help="Asai L-factor (and closed-form zeta integral)")
    p.add_argument("--nu", required=True)
    p.add_argument("--kappa", type=int, default=0)
    p.add_argument("--s", required=True)
    p.add_argument("--zeta", action="store_true", help="also print the zeta integral")
    _common(p)

    vf = sub.add_parser("verify", help="run a verification suite")
    vf.add_argument("suite", choices=suites.SUITES + ("all",))
    vf.add_argument("--cases", type=int)
    vf.add_argument("--n", type=int)
    vf.add_argument("--seed", type=int, default=0)
    _common(vf)

    tb = sub.add_parser("table", help="CSV table over a parameter grid")
    tb.add_argument("function", choices=("spherical-c", "minimal-c", "asai-l"))
    tb.add_argument("--nu", required=True)
    tb.add_argument("--kappa", type=int, default=0)
    tb.add_argument("--ell")
    tb.add_argument("--a1", help="number, JSON array, or logspace:lo:hi:num")
    tb.add_argument("--a2")
    tb.add_argument("--s")
    _common(tb)
    return parser


def load_config(args) -> RunConfig:
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        if not isinstance(base, dict) or set(base) - known:
            raise UsageError(f"--config: unknown keys {sorted(set(base) - known)}")
    cfg = RunConfig(**base)
    over = {}
    if args.tol is not None:
        over["tolerance"] = args.tol
    if args.mb_height is not None:
        over["mb_height"] = args.mb_height
    if args.mb_step is not None:
        over["mb_step"] = args.mb_step
    if args.quad_window is not None:
        over["quad_window"] = args.quad_window
    if args.format is not None:
        over["output_format"] = args.format
    if args.threads is not None:
        over["threads"] = args.threads
    elif "threads" not in base and os.environ.get("WHITTAKER_THREADS"):
        try:
            over["threads"] = int(os.environ["WHITTAKER_THREADS"])
        except ValueError:
            raise UsageError("WHITTAKER_THREADS must be an integer") from None
    return replace(cfg, **over)


def run(argv=None) -> tuple:
    """Parse and execute; returns (stdout text, exit code)."""
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args)
        # an explicit --tol makes eval refine its contour grid until reached
        args.mb_tol = args.tol
        if args.command == "eval":
            return cmd_eval(args, cfg)
        if args.command == "verify":
            return cmd_verify(args, cfg)
        return cmd_table(args, cfg)
    except UsageError as exc:
        return _dump({"error": exc.kind, "detail": str(exc)}) + "\n", EXIT_USAGE
    except NumericalError as exc:
        return _dump({"error": exc.kind, "detail": str(exc)}) + "\n", EXIT_NUMERIC
    except WhittakerError as exc:
        return _dump({"error": exc.kind, "detail": str(exc)}) + "\n", EXIT_USAGE


def main(argv=None) -> int:
    text, code = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

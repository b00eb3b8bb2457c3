"""Command-line entry point.

Subcommands: estimate, estimate-zero, simulate, rate-check, kernel-dump,
lkernel-dump, mellin-eval, self-test.  All file outputs are written
atomically (temp file + rename) and numeric output carries 12 significant
digits.  Exit codes: 0 success, 2 usage error, 1 computational error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import estimators as es
from . import kernels
from . import lkernel as lk
from . import mellin as mm
from . import simulate as sim
from .errors import EmptyFile, MelldecError, ParseError


class UsageError(Exception):
    """Bad invocation detected after argparse (missing files, bad grammar)."""


# ---------------------------------------------------------------------------
# small parsers


def parse_complex(text):
    """Parse 'a+bi' (or plain 'a', 'bi'); 'j' accepted as well."""
    t = text.strip().replace(" ", "")
    if t.endswith(("i", "I")):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}")


_MODEL_GRAMMAR = {
    # name: (builder, min args, max args)
    "uniform": (mm.uniform, 0, 1),
    "beta": (mm.beta, 1, 2),
    "power": (mm.power, 1, 2),
    "pareto": (mm.pareto, 2, 2),
    "gamma": (mm.gamma_errors, 2, 2),
    "halfnormal": (mm.half_normal, 0, 1),
    "logproduct": (mm.log_product_uniform, 0, 0),
    "pointmass": (mm.point_mass, 0, 0),
}

_MODEL_HELP = ("uniform:theta | beta:nu[,theta] | power:nu[,theta] | "
               "pareto:nu,theta | gamma:alpha,mu | halfnormal:upsilon | "
               "logproduct | pointmass")


def parse_model(text):
    name, _, rest = text.strip().partition(":")
    entry = _MODEL_GRAMMAR.get(name.lower())
    if entry is None:
        raise argparse.ArgumentTypeError(
            f"unknown error model {name!r}; expected {_MODEL_HELP}")
    builder, lo, hi = entry
    try:
        args = [float(a) for a in rest.split(",") if a.strip()] if rest else []
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad model parameters in {text!r}")
    if not lo <= len(args) <= hi:
        raise argparse.ArgumentTypeError(
            f"model {name!r} takes {lo}..{hi} parameters, got {len(args)}")
    try:
        return builder(*args)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"model {text!r}: {exc}")


def _parse_kv(rest, what):
    out = {}
    for part in rest.split(","):
        part = part.strip()
        if not part:
            continue
        key, eq, val = part.partition("=")
        if not eq:
            raise UsageError(f"{what}: expected key=value, got {part!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"{what}: bad numeric value in {part!r}")
    return out


def load_sample(path):
    """One numeric column, optional single header line."""
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except FileNotFoundError:
        raise UsageError(f"sample file not found: {path}")
    vals = []
    for i, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text:
            continue
        try:
            vals.append(float(text))
        except ValueError:
            if i == 1 and not vals:
                continue  # header row
            raise ParseError(i, f"line {i}: not a number: {text!r}")
    if not vals:
        raise EmptyFile(f"no numeric rows in {path}")
    return np.asarray(vals, dtype=float)


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".melldec-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _sig12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _sig12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sig12(v) for v in obj]
    return obj


def _emit(text, out):
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _json_text(payload):
    return json.dumps(_sig12(payload), indent=2) + "\n"


# ---------------------------------------------------------------------------
# estimation commands


def _point_kernel(text, m):
    name, _, arg = (text or "gj").partition(":")
    name = name.lower()
    if name == "gj":
        return kernels.build_gaussian_jackknife_kernel(m)
    if name == "flat":
        return kernels.build_flat_kernel(m, int(float(arg or "2")))
    if name == "supersmooth":
        return kernels.build_supersmooth_kernel(m, int(float(arg or "1")))
    raise UsageError(f"unknown kernel {text!r}; expected gj, flat:q or "
                     "supersmooth:lam")


def _rule_bandwidth(rule_text, x0, n, zero):
    """Returns (s override or None, h) from a tuning-rule string."""
    kind, _, rest = rule_text.strip().partition(":")
    kind = kind.lower()
    kv = _parse_kv(rest, f"rule {kind}")
    try:
        if zero:
            if kind != "zero":
                raise UsageError("origin estimation takes the rule "
                                 "zero:A=..,beta=..,M=..,p=..,q=..")
            s, h, _ = es.bandwidth_zero(kv["A"], kv["beta"], kv["M"],
                                        kv.get("p", 0.0), kv.get("q", 0.0), n)
            return s, h
        if kind == "smooth":
            return None, es.bandwidth_smooth(kv["A"], kv["beta"], x0, n,
                                             gamma=kv.get("gamma", 1.0),
                                             r=kv.get("r"))
        if kind == "moment":
            s = es.s_star_moment(kv["alpha"], kv["b"], kv.get("eps", 0.01))
            h = es.bandwidth_moment(kv["A"], kv["beta"], kv.get("gamma", 1.0),
                                    kv["alpha"], kv["M"], kv["b"], x0, n,
                                    eps=kv.get("eps", 0.01),
                                    C5=kv.get("C5", 1.0))
            return s, h
        if kind == "supersmooth":
            return None, es.bandwidth_supersmooth(
                kv["A"], kv["beta"], kv["gamma"], kv["lam"], x0, n,
                C1=kv.get("C1", 1.0))
    except KeyError as exc:
        raise UsageError(f"rule {kind!r} is missing parameter {exc.args[0]}")
    raise UsageError(f"unknown rule {kind!r}; expected smooth, moment, "
                     "supersmooth or zero")


def _estimate_common(args, zero):
    y = load_sample(args.input)
    n = y.size
    if (args.h is None) == (args.rule is None):
        raise UsageError("give exactly one of --h and --rule")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        s = args.s
        if args.rule is not None:
            x0 = None if zero else args.point
            s_rule, h = _rule_bandwidth(args.rule, x0, n, zero)
            if s is None:
                s = s_rule
        else:
            h = args.h
        if s is None:
            s = 0.5 if zero else 0.0
        if zero:
            if (args.kernel or "exp") == "exp":
                K = kernels.build_exp_zero_kernel(args.m)
            elif args.kernel == "gauss":
                K = kernels.build_zero_kernel(args.m, s)
            else:
                raise UsageError("origin kernels are exp or gauss")
            L = lk.lkernel_zero_numeric(args.model, K, s, h)
            cfg = es.EstimatorConfig(es.AtZero(), s, h, L, provenance="cli")
            value = es.estimate_at_zero(y, cfg)
        else:
            K = _point_kernel(args.kernel, args.m)
            L = lk.lkernel_numeric(args.model, K, s, h)
            cfg = es.EstimatorConfig(es.AtPoint(args.point), s, h, L,
                                     provenance="cli")
            value = es.estimate_at_point(y, cfg)
    payload = {"estimate": value, "h": h, "s": s, "n": int(n),
               "warnings": [str(w.message) for w in caught]}
    _emit(_json_text(payload), args.out)
    return 0


def _cmd_estimate(args):
    return _estimate_common(args, zero=False)


def _cmd_estimate_zero(args):
    return _estimate_common(args, zero=True)


# ---------------------------------------------------------------------------
# simulation commands


def _spec_from_toml(path):
    try:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
    except FileNotFoundError:
        raise UsageError(f"spec file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad TOML in {path}: {exc}")
    try:
        tgt = doc["target"]
        kind = tgt["kind"]
        if kind == "exponential":
            target = sim.exponential_target(tgt.get("rate", 1.0))
        elif kind == "logcauchy":
            target = sim.log_cauchy_target(tgt.get("x0", 1.0))
        else:
            raise UsageError(f"unknown target kind {kind!r} "
                             "(exponential | logcauchy)")
        try:
            model = parse_model(doc["model"]["spec"])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc))
        camp = doc["campaign"]
        points = camp.get("points", [1.0])
        if points == "zero":
            points = [0.0]
        spec_kw = dict(
            target=target, model=model, n_grid=camp["n"], points=points,
            runs=camp.get("runs", 200),
            oracle_runs=camp.get("oracle_runs", 300),
            seed=camp.get("seed", 0), m=camp.get("m", 1),
            s=camp.get("s"),
        )
        if "h_grid" in camp:
            spec_kw["h_grid"] = camp["h_grid"]
        return sim.SimulationSpec(**spec_kw)
    except KeyError as exc:
        raise UsageError(f"spec {path} is missing key {exc.args[0]!r}")
    except ValueError as exc:
        raise UsageError(f"spec {path}: {exc}")


def _cmd_simulate(args):
    spec = _spec_from_toml(args.spec)
    report = sim.monte_carlo_risk(spec, workers=args.workers)
    _atomic_write(args.out, report.to_csv())
    if args.svg:
        _atomic_write(args.svg, sim.render_boxplot_svg(report))
    return 0


def _cmd_rate_check(args):
    try:
        with open(args.report, encoding="utf-8") as f:
            report = sim.RiskReport.from_csv(f.read())
    except FileNotFoundError:
        raise UsageError(f"report file not found: {args.report}")
    except ValueError as exc:
        raise UsageError(str(exc))
    fit = sim.rate_regression(report, x0=args.x0)
    payload = {"slope": fit.slope, "intercept": fit.intercept,
               "residual": fit.residual}
    _emit(_json_text(payload), args.out)
    return 0


# ---------------------------------------------------------------------------
# dumps and evaluation


def _cmd_kernel_dump(args):
    m = args.m
    fam = args.family.lower()
    if fam == "gj":
        K, lo, hi = kernels.build_gaussian_jackknife_kernel(m), -8.0, 8.0
    elif fam == "flat":
        K, lo, hi = kernels.build_flat_kernel(m, args.q), -1.0, 1.0
    elif fam == "supersmooth":
        K, lo, hi = kernels.build_supersmooth_kernel(m, args.lam), -12.0, 12.0
    elif fam == "zero-exp":
        K, lo, hi = kernels.build_exp_zero_kernel(m), 0.0, 12.0 * (m + 1)
    elif fam == "zero-gauss":
        K, lo, hi = kernels.build_zero_kernel(m, args.s), 0.0, 12.0 * (m + 1)
    else:
        raise UsageError(f"unknown kernel family {args.family!r}")
    lo = args.lo if args.lo is not None else lo
    hi = args.hi if args.hi is not None else hi
    t = np.linspace(lo, hi, args.count)
    vals = K.evaluate(t)
    lines = ["t,K"] + [f"{a:.12g},{b:.12g}" for a, b in zip(t, vals)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_lkernel_dump(args):
    if args.zero:
        s = 0.5 if args.s is None else args.s
        K = kernels.build_exp_zero_kernel(args.m)
        L = lk.lkernel_zero_numeric(args.model, K, s, args.h)
        hi = args.hi if args.hi is not None else 12.0 * (args.m + 1) * args.h
        y = np.linspace(args.lo or 0.0, hi, args.count)
        vals = L.evaluate0(y)
    else:
        s = 0.0 if args.s is None else args.s
        K = _point_kernel(args.kernel, args.m)
        L = lk.lkernel_numeric(args.model, K, s, args.h)
        lo = args.lo if args.lo is not None else args.point / 20.0
        hi = args.hi if args.hi is not None else args.point * 20.0
        y = np.geomspace(lo, hi, args.count)
        vals = L.evaluate(args.point, y)
    lines = ["y,L"] + [f"{a:.12g},{b:.12g}" for a, b in zip(y, vals)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_mellin_eval(args):
    val = args.model.mellin(args.z)
    re, im = val.real, val.imag
    if abs(im) <= 1e-14 * (1.0 + abs(re)):
        text = f"{re:.12g}"
    else:
        text = f"{re:.12g}{im:+.12g}i"
    _emit(text + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# self-test


def _selftest_checks():
    checks = []
    six = [mm.uniform(), mm.beta(1.0), mm.pareto(3.0, 1.0),
           mm.gamma_errors(2.0, 3.0), mm.half_normal(),
           mm.log_product_uniform()]
    for model in six:
        worst = 0.0
        for w in np.linspace(-20.0, 20.0, 40):
            za = mm.mellin_analytic(model, 1 + 1j * w)
            zn = mm.mellin_numeric(model.density, 1 + 1j * w)
            worst = max(worst, abs(za - zn) / (1.0 + abs(za)))
        checks.append((f"mellin {model.label}", worst, 1e-8))

    xs = np.geomspace(0.3, 3.0, 7)
    ys = np.geomspace(0.05, 6.0, 40)
    for nu, m, h in ((1.0, 1, 0.3), (0.5, 2, 0.4)):
        closed = lk.lkernel_closed_beta(nu, m, h)
        K = kernels.build_gaussian_jackknife_kernel(m)
        numeric = lk.lkernel_numeric(mm.power(nu), K, 0.0, h,
                                     prefer_closed=False)
        scale = max(abs(closed.evaluate(x, ys)).max() for x in xs)
        worst = max(abs(closed.evaluate(x, ys) - numeric.evaluate(x, ys)).max()
                    for x in xs) / scale
        checks.append((f"lkernel closed-vs-numeric nu={nu:g} m={m} h={h:g}",
                       worst, 1e-6))

    closed0 = lk.lkernel_closed_beta_zero(1.0, 1, 0.5, 0.3)
    numeric0 = lk.lkernel_zero_numeric(mm.uniform(), kernels.build_exp_zero_kernel(1),
                                       0.5, 0.3, prefer_closed=False)
    y0 = np.linspace(0.0, 5.0, 40)
    scale = abs(closed0.evaluate0(y0)).max()
    worst = abs(closed0.evaluate0(y0) - numeric0.evaluate0(y0)).max() / scale
    checks.append(("lkernel origin closed-vs-numeric nu=1 m=1 h=0.3",
                   worst, 1e-6))
    return checks


def _cmd_self_test(args):
    failed = 0
    for name, err, tol in _selftest_checks():
        ok = err < tol
        failed += not ok
        print(f"{'ok  ' if ok else 'FAIL'} {name}: max rel err {err:.3e} "
              f"(tol {tol:g})")
    print(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# wiring


def build_parser():
    p = argparse.ArgumentParser(
        prog="melldec",
        description="Density estimation under multiplicative measurement "
                    "errors, via Mellin-transform kernel estimators.")
    sub = p.add_subparsers(dest="command", metavar="command")

    def add(name, fn, help_text):
        q = sub.add_parser(name, help=help_text)
        q.set_defaults(func=fn)
        return q

    q = add("estimate", _cmd_estimate, "estimate the density at a point")
    q.add_argument("--input", required=True, help="CSV sample, one column")
    q.add_argument("--model", required=True, type=parse_model,
                   help=_MODEL_HELP)
    q.add_argument("--point", required=True, type=float,
                   help="evaluation point x0 > 0")
    q.add_argument("--h", type=float, help="bandwidth")
    q.add_argument("--rule", help="tuning rule, e.g. smooth:A=1,beta=1 or "
                                  "moment:... or supersmooth:...")
    q.add_argument("--s", type=float, help="inversion-line exponent "
                                           "(default 0, or the rule's s*)")
    q.add_argument("--m", type=int, default=1, help="kernel order")
    q.add_argument("--kernel", help="gj | flat:q | supersmooth:lam")
    q.add_argument("--out", help="write JSON here instead of stdout")

    q = add("estimate-zero", _cmd_estimate_zero,
            "estimate the density at the origin")
    q.add_argument("--input", required=True)
    q.add_argument("--model", required=True, type=parse_model,
                   help=_MODEL_HELP)
    q.add_argument("--h", type=float)
    q.add_argument("--rule", help="zero:A=..,beta=..,M=..[,p=..][,q=..]")
    q.add_argument("--s", type=float, help="exponent s > 0 (default 0.5)")
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--kernel", help="exp | gauss")
    q.add_argument("--out")

    q = add("simulate", _cmd_simulate, "run a Monte-Carlo risk campaign")
    q.add_argument("--spec", required=True, help="campaign spec (TOML)")
    q.add_argument("--out", required=True, help="risk report CSV")
    q.add_argument("--svg", help="also draw boxplots to this SVG")
    q.add_argument("--workers", type=int,
                   help="thread count (default MELLDEC_WORKERS or cpu count)")

    q = add("rate-check", _cmd_rate_check,
            "regress log median error on the rate regressor")
    q.add_argument("--report", required=True, help="risk report CSV")
    q.add_argument("--x0", type=float, help="select one evaluation point")
    q.add_argument("--out")

    q = add("kernel-dump", _cmd_kernel_dump, "tabulate a base kernel")
    q.add_argument("--family", required=True,
                   help="gj | flat | supersmooth | zero-exp | zero-gauss")
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--q", type=int, default=2, help="flat-top exponent")
    q.add_argument("--lam", type=int, default=1, help="supersmooth index")
    q.add_argument("--s", type=float, default=0.5, help="zero-gauss exponent")
    q.add_argument("--lo", type=float)
    q.add_argument("--hi", type=float)
    q.add_argument("--count", type=int, default=401)
    q.add_argument("--out")

    q = add("lkernel-dump", _cmd_lkernel_dump,
            "tabulate an observation-side kernel")
    q.add_argument("--model", required=True, type=parse_model,
                   help=_MODEL_HELP)
    q.add_argument("--h", required=True, type=float)
    q.add_argument("--point", type=float, default=1.0)
    q.add_argument("--zero", action="store_true",
                   help="tabulate the origin kernel instead")
    q.add_argument("--s", type=float)
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--kernel", help="gj | flat:q | supersmooth:lam")
    q.add_argument("--lo", type=float)
    q.add_argument("--hi", type=float)
    q.add_argument("--count", type=int, default=201)
    q.add_argument("--out")

    q = add("mellin-eval", _cmd_mellin_eval, "evaluate a model's transform")
    q.add_argument("--model", required=True, type=parse_model,
                   help=_MODEL_HELP)
    q.add_argument("--z", required=True, type=parse_complex,
                   help="complex point, e.g. 2+0i")
    q.add_argument("--out")

    add("self-test", _cmd_self_test,
        "run the analytic-vs-numeric verification suites")
    return p


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MelldecError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

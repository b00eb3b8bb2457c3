"""Monte-Carlo harness: sample generation, risk summaries, rate regression.

The reproduction protocol: for each sample size and evaluation point, an
oracle bandwidth is found by minimising empirical MSE over an h grid, then
independent replications record the absolute estimation error at that
bandwidth.  Every replication owns a pre-assigned random substream, so
reports are byte-identical regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import estimators as es
from . import kernels
from . import lkernel as lk
from .errors import DegenerateDesign

__all__ = [
    "TargetDensity",
    "exponential_target",
    "log_cauchy_target",
    "custom_target",
    "SimulationSpec",
    "RiskRow",
    "RiskReport",
    "RateFit",
    "default_h_grid",
    "generate_sample",
    "oracle_bandwidth",
    "monte_carlo_risk",
    "rate_regression",
    "render_boxplot_svg",
]

_QS = (0.05, 0.25, 0.5, 0.75, 0.95)


# ---------------------------------------------------------------------------
# target densities


@dataclass(frozen=True)
class TargetDensity:
    """Density of the unobserved positive variable, with a matching sampler."""

    kind: str
    params: dict
    label: str
    pdf_fn: object
    sampler_fn: object
    cdf_fn: object = None

    def pdf(self, x):
        xx = np.atleast_1d(np.asarray(x, dtype=float))
        out = self.pdf_fn(xx)
        return float(out[0]) if np.ndim(x) == 0 else out

    def sample(self, rng, n):
        return self.sampler_fn(rng, int(n))

    def normalization_defect(self):
        """|integral of the density - 1| by quadrature."""
        if self.kind == "logcauchy":
            # substitute u = ln(x/x0): the integrand becomes a standard Cauchy
            val, _ = integrate.quad(
                lambda u: 1.0 / (math.pi * (1.0 + u * u)),
                -np.inf, np.inf)
        else:
            val, _ = integrate.quad(lambda t: self.pdf(t), 0.0, np.inf,
                                    limit=200)
        return abs(val - 1.0)

    def self_test(self, n=100000, seed=0):
        """Kolmogorov-Smirnov statistic of n sampler draws against the cdf.

        Values below 1.95/sqrt(n) are consistent with the sampler drawing
        from the stated density (p > 0.001).
        """
        rng = np.random.Generator(np.random.Philox(seed))
        draws = np.sort(self.sample(rng, n))
        if self.cdf_fn is not None:
            u = self.cdf_fn(draws)
        else:
            grid = np.linspace(0.0, float(draws[-1]) * 1.02, 32769)
            mass = integrate.cumulative_trapezoid(self.pdf(grid), grid,
                                                  initial=0.0)
            u = np.interp(draws, grid, mass)
        k = np.arange(1, n + 1, dtype=float)
        return float(max((k / n - u).max(), (u - (k - 1) / n).max()))


def exponential_target(lam=1.0):
    """f(x) = lam * exp(-lam x) on [0, inf)."""
    lam = float(lam)
    if lam <= 0:
        raise ValueError("rate must be positive")

    def pdf(x):
        out = np.zeros_like(x)
        m = x >= 0
        out[m] = lam * np.exp(-lam * x[m])
        return out

    return TargetDensity(
        kind="exponential",
        params={"lam": lam},
        label=f"exponential:{lam:g}",
        pdf_fn=pdf,
        sampler_fn=lambda rng, n: rng.exponential(1.0 / lam, n),
        cdf_fn=lambda x: -np.expm1(-lam * np.maximum(x, 0.0)),
    )


def log_cauchy_target(x0=1.0):
    """f(x) = 1 / (pi x (1 + ln^2(x/x0))) on (0, inf)."""
    x0 = float(x0)
    if x0 <= 0:
        raise ValueError("scale must be positive")

    def pdf(x):
        out = np.zeros_like(x)
        m = x > 0
        u = np.log(x[m] / x0)
        out[m] = 1.0 / (math.pi * x[m] * (1.0 + u * u))
        return out

    def cdf(x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        m = x > 0
        out[m] = 0.5 + np.arctan(np.log(x[m] / x0)) / math.pi
        return out

    def sampler(rng, n):
        # inverse-CDF form: x0 * exp(tan(pi(U - 1/2))); the far tail
        # legitimately exceeds float range, so let it saturate quietly
        with np.errstate(over="ignore"):
            return x0 * np.exp(np.tan(math.pi * (rng.random(n) - 0.5)))

    return TargetDensity(
        kind="logcauchy",
        params={"x0": x0},
        label=f"logcauchy:{x0:g}",
        pdf_fn=pdf,
        sampler_fn=sampler,
        cdf_fn=cdf,
    )


def custom_target(pdf, sampler, cdf=None, label="custom", check=True):
    """Wrap a user density/sampler pair; verifies unit mass unless check=False."""

    def pdf_vec(x):
        return np.asarray(pdf(x), dtype=float)

    target = TargetDensity(
        kind="custom", params={}, label=label,
        pdf_fn=pdf_vec, sampler_fn=sampler, cdf_fn=cdf,
    )
    if check:
        defect = target.normalization_defect()
        if defect > 1e-6:
            raise ValueError(f"density does not integrate to 1 (defect {defect:.3g})")
    return target


# ---------------------------------------------------------------------------
# specs and reports


def default_h_grid():
    """20 log-spaced bandwidths in [0.02, 1.0]."""
    return tuple(float(h) for h in np.geomspace(0.02, 1.0, 20))


@dataclass(frozen=True)
class SimulationSpec:
    """One campaign: (target, model) pair, n grid, evaluation points, seeding.

    A point value of 0.0 selects the origin estimator; positive values the
    interior one.  ``s=None`` resolves to 0 at interior points and to the
    rate-optimal (1-p)/2 at the origin.
    """

    target: TargetDensity
    model: object
    n_grid: tuple
    points: tuple
    runs: int = 200
    oracle_runs: int = 300
    h_grid: tuple = dataclasses.field(default_factory=default_h_grid)
    seed: int = 0
    m: int = 1
    s: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "points", tuple(float(x) for x in self.points))
        object.__setattr__(self, "h_grid", tuple(float(h) for h in self.h_grid))
        if not self.n_grid or min(self.n_grid) < 1:
            raise ValueError("n grid must hold positive sample sizes")
        if not self.points or min(self.points) < 0:
            raise ValueError("points must be nonnegative (0 targets the origin)")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.oracle_runs < 30:
            raise ValueError("oracle search needs at least 30 runs")
        if not self.h_grid or min(self.h_grid) <= 0:
            raise ValueError("h grid must hold positive bandwidths")
        if list(self.h_grid) != sorted(self.h_grid):
            raise ValueError("h grid must be sorted ascending")


@dataclass(frozen=True)
class RiskRow:
    n: int
    x0: float
    h_star: float
    q05: float
    q25: float
    median: float
    q75: float
    q95: float
    mse: float
    runs: int
    seed: int


_CSV_HEADER = "n,x0,h_star,q05,q25,median,q75,q95,mse,runs,seed"


@dataclass(frozen=True)
class RiskReport:
    """Per-(n, x0) error quantiles; deterministic function of (spec, seed)."""

    rows: tuple

    def to_csv(self):
        lines = [_CSV_HEADER]
        for r in self.rows:
            vals = [str(r.n)]
            vals += [f"{v:.12g}" for v in
                     (r.x0, r.h_star, r.q05, r.q25, r.median, r.q75, r.q95, r.mse)]
            vals += [str(r.runs), str(r.seed)]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].strip() != _CSV_HEADER:
            raise ValueError("unrecognized risk report header")
        rows = []
        for ln in lines[1:]:
            f = ln.split(",")
            if len(f) != 11:
                raise ValueError(f"bad risk report row: {ln!r}")
            rows.append(RiskRow(int(f[0]), *[float(v) for v in f[1:9]],
                                int(f[9]), int(f[10])))
        return cls(tuple(rows))


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residual: float


# ---------------------------------------------------------------------------
# sampling


def generate_sample(target, model, n, seed):
    """Y_i = X_i * eta_i, driven by one counter-based generator.

    ``seed`` may be an int or a numpy SeedSequence; equal seeds give equal
    samples, so any replication is reproducible in isolation.
    """
    n = int(n)
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    x = target.sample(rng, n)
    eta = model.sample(rng, n)
    return x * eta


def _substream(seed, stream, n, x0, r):
    # stable spawn key: (stream id, n, packed x0, replication index)
    xk = int.from_bytes(struct.pack("<d", float(x0)), "little")
    key = (stream, int(n), xk & 0xFFFFFFFF, (xk >> 32) & 0xFFFFFFFF, int(r))
    return np.random.SeedSequence(entropy=int(seed), spawn_key=key)


def _resolve_s(spec, zero):
    if spec.s is not None:
        return float(spec.s)
    if not zero:
        return 0.0
    zb = getattr(spec.model, "zero_behavior", None)
    p = zb.p if zb is not None else 0.0
    return 0.5 * (1.0 - p)


def _build_lkernel(spec, zero, h):
    s = _resolve_s(spec, zero)
    if zero:
        K = kernels.build_exp_zero_kernel(spec.m)
        return lk.lkernel_zero_numeric(spec.model, K, s, h)
    K = kernels.build_gaussian_jackknife_kernel(spec.m)
    return lk.lkernel_numeric(spec.model, K, s, h)


def _config(spec, x0, L):
    zero = x0 == 0.0
    target = es.AtZero() if zero else es.AtPoint(x0)
    return es.EstimatorConfig(target, _resolve_s(spec, zero), L.h, L)


def _estimate(y, cfg):
    if isinstance(cfg.target, es.AtZero):
        return es.estimate_at_zero(y, cfg)
    return es.estimate_at_point(y, cfg)


# ---------------------------------------------------------------------------
# campaign operations


def oracle_bandwidth(spec, n, x0):
    """Empirical-MSE argmin over the h grid; ties resolve to the smaller h.

    Returns (h_star, mse_curve); the curve is kept for audit.
    """
    zero = x0 == 0.0
    configs = [_config(spec, x0, _build_lkernel(spec, zero, h))
               for h in spec.h_grid]
    truth = spec.target.pdf(0.0 if zero else x0)
    err2 = np.empty((spec.oracle_runs, len(configs)))
    for r in range(spec.oracle_runs):
        y = generate_sample(spec.target, spec.model, n,
                            _substream(spec.seed, 0, n, x0, r))
        for j, cfg in enumerate(configs):
            err2[r, j] = (_estimate(y, cfg) - truth) ** 2
    mse = err2.mean(axis=0)
    return spec.h_grid[int(np.argmin(mse))], mse


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("MELLDEC_WORKERS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


def monte_carlo_risk(spec, workers=None):
    """Full campaign: oracle bandwidth, then ``spec.runs`` replications per cell.

    Replications run in parallel with pre-assigned substreams and are
    aggregated by index, so the report does not depend on the worker count.
    A failing replication aborts the whole report.
    """
    nworkers = _worker_count(workers)
    rows = []
    for n in spec.n_grid:
        for x0 in spec.points:
            zero = x0 == 0.0
            h_star, _ = oracle_bandwidth(spec, n, x0)
            cfg = _config(spec, x0, _build_lkernel(spec, zero, h_star))
            truth = spec.target.pdf(0.0 if zero else x0)
            errs = np.empty(spec.runs)

            def one_run(r, n=n, x0=x0, cfg=cfg, truth=truth, errs=errs):
                y = generate_sample(spec.target, spec.model, n,
                                    _substream(spec.seed, 1, n, x0, r))
                errs[r] = abs(_estimate(y, cfg) - truth)

            if nworkers == 1:
                for r in range(spec.runs):
                    one_run(r)
            else:
                chunk = max(1, spec.runs // (4 * nworkers))
                with ThreadPoolExecutor(max_workers=nworkers) as ex:
                    for _ in ex.map(one_run, range(spec.runs), chunksize=chunk):
                        pass
            q = np.quantile(errs, _QS)
            rows.append(RiskRow(n, x0, h_star, *(float(v) for v in q),
                                float(np.mean(errs * errs)), spec.runs,
                                spec.seed))
    return RiskReport(tuple(rows))


def rate_regression(report, x0=None):
    """OLS slope of log median error against the theoretical rate regressor.

    Interior points regress on ln n; the origin (x0 = 0) regresses on
    ln(n / ln n), the effective sample size of the (ln n / n)^(beta/(2
    beta+1)) rate shape, so a decaying error always means a negative slope.
    Accepts a RiskReport or an iterable of rows; pass ``x0`` to select one
    point from a multi-point report.
    """
    rows = list(report.rows if isinstance(report, RiskReport) else report)
    if x0 is not None:
        rows = [r for r in rows if r.x0 == x0]
    points = sorted({r.x0 for r in rows})
    if len(points) != 1:
        raise ValueError("report mixes evaluation points; select one with x0=")
    ns = np.array([r.n for r in rows], dtype=float)
    med = np.array([r.median for r in rows], dtype=float)
    if len(set(ns)) < 3:
        raise DegenerateDesign("rate regression needs >= 3 distinct n")
    t = np.log(ns / np.log(ns)) if points[0] == 0.0 else np.log(ns)
    slope, intercept = np.polyfit(t, np.log(med), 1)
    resid = np.log(med) - (slope * t + intercept)
    return RateFit(float(slope), float(intercept),
                   float(np.sqrt(np.mean(resid * resid))))


# ---------------------------------------------------------------------------
# plain-SVG boxplots


def _boxplot_parts(rows, width, height):
    pad_l, pad_r, pad_t, pad_b = 64.0, 16.0, 28.0, 44.0
    ymax = max(r.q95 for r in rows) * 1.08 or 1.0
    span_y = height - pad_t - pad_b

    def ypix(v):
        return height - pad_b - (v / ymax) * span_y

    slot = (width - pad_l - pad_r) / len(rows)
    half = min(22.0, slot * 0.3)
    multi = len({r.x0 for r in rows}) > 1
    parts = []
    for i, r in enumerate(rows):
        cx = pad_l + (i + 0.5) * slot
        y05, y25, y50, y75, y95 = (ypix(v) for v in
                                   (r.q05, r.q25, r.median, r.q75, r.q95))
        parts.append(f'<line x1="{cx:.6g}" y1="{y05:.6g}" x2="{cx:.6g}" '
                     f'y2="{y95:.6g}" stroke="#555"/>')
        for yy in (y05, y95):
            parts.append(f'<line x1="{cx - half / 2:.6g}" y1="{yy:.6g}" '
                         f'x2="{cx + half / 2:.6g}" y2="{yy:.6g}" stroke="#555"/>')
        parts.append(f'<rect x="{cx - half:.6g}" y="{y75:.6g}" '
                     f'width="{2 * half:.6g}" height="{y25 - y75:.6g}" '
                     f'fill="#9ecae1" stroke="#3182bd"/>')
        parts.append(f'<line x1="{cx - half:.6g}" y1="{y50:.6g}" '
                     f'x2="{cx + half:.6g}" y2="{y50:.6g}" '
                     f'stroke="#08306b" stroke-width="2"/>')
        lab = f"n={r.n}" + (f", x={r.x0:g}" if multi else "")
        parts.append(f'<text x="{cx:.6g}" y="{height - pad_b + 16:.6g}" '
                     f'font-size="11" text-anchor="middle">{lab}</text>')
    axis_x = pad_l - 8.0
    parts.append(f'<line x1="{axis_x:.6g}" y1="{ypix(0):.6g}" '
                 f'x2="{axis_x:.6g}" y2="{ypix(ymax / 1.08):.6g}" stroke="#000"/>')
    for k in range(5):
        v = ymax * k / 5.0
        parts.append(f'<line x1="{axis_x - 4:.6g}" y1="{ypix(v):.6g}" '
                     f'x2="{axis_x:.6g}" y2="{ypix(v):.6g}" stroke="#000"/>')
        parts.append(f'<text x="{axis_x - 6:.6g}" y="{ypix(v) + 4:.6g}" '
                     f'font-size="10" text-anchor="end">{v:.3g}</text>')
    return parts


def render_boxplot_svg(report, title="absolute error"):
    """Standalone SVG with one box (q05/q25/median/q75/q95) per report row."""
    rows = report.rows if isinstance(report, RiskReport) else tuple(report)
    if not rows:
        raise ValueError("empty report")
    width = max(300.0, 64.0 + 16.0 + 72.0 * len(rows))
    height = 340.0
    body = "\n".join(_boxplot_parts(rows, width, height))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.6g}" '
        f'height="{height:.6g}" viewBox="0 0 {width:.6g} {height:.6g}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<text x="{width / 2:.6g}" y="18" font-size="13" '
        f'text-anchor="middle">{title}</text>\n'
        f"{body}\n</svg>\n"
    )

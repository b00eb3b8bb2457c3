"""Acceptance suite: one test per shipped guarantee.

Each criterion is a single test so the verbose runner emits one pass/fail
line apiece.  The simulation campaigns reuse module fixtures; everything is
seeded, so the suite is deterministic end to end.
"""

import math
import os
import time

import numpy as np
import pytest
from scipy import integrate, special

import melldec.cli as cli
import melldec.estimators as es
import melldec.kernels as kk
import melldec.lkernel as lk
import melldec.mellin as mm
import melldec.simulate as sim

SEED = 20250817
N_GRID = (100, 300, 500, 1000, 5000)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def fig_point_left():
    """Exponential target, uniform noise, x0 = 1, full n sweep."""
    spec = sim.SimulationSpec(target=sim.exponential_target(1.0),
                              model=mm.uniform(1.0), n_grid=N_GRID,
                              points=(1.0,), runs=200, oracle_runs=300,
                              seed=SEED)
    return timed(lambda: sim.monte_carlo_risk(spec))


@pytest.fixture(scope="module")
def fig_zero():
    """Origin estimation of 2 e^(-2x) under two power-noise shapes."""
    reports = {}

    def build():
        for nu in (1.0, 0.5):
            spec = sim.SimulationSpec(target=sim.exponential_target(2.0),
                                      model=mm.power(nu, 1.0), n_grid=N_GRID,
                                      points=(0.0,), runs=200,
                                      oracle_runs=300, seed=SEED)
            reports[nu] = sim.monte_carlo_risk(spec)
        return reports

    return timed(build)


def test_c01_mellin_oracle_suite():
    """Closed-form transforms match quadrature on Re(z)=1 for the catalog."""

    def check():
        worst = 0.0
        models = [mm.uniform(), mm.beta(1.0), mm.pareto(3.0, 1.0),
                  mm.gamma_errors(2.0, 3.0), mm.half_normal(),
                  mm.log_product_uniform()]
        for model in models:
            for w in np.linspace(-20.0, 20.0, 40):
                za = mm.mellin_analytic(model, 1 + 1j * w)
                zn = mm.mellin_numeric(model.density, 1 + 1j * w)
                rel = abs(za - zn) / (1.0 + abs(za))
                assert rel < 1e-8, (model.label, w, rel)
                worst = max(worst, rel)
        return worst

    worst, elapsed = timed(check)
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s"
    print(f"[c01] worst rel err {worst:.2e}, {elapsed:.1f}s")


def test_c02_decay_exponent_recovery():
    """Fitted transform-decay exponents match the declared gamma values."""

    def check():
        for model, gamma in ((mm.uniform(), 1.0),
                             (mm.log_product_uniform(), 2.0),
                             (mm.pareto(3.0, 1.0), 1.0)):
            gh, _ = mm.fit_decay_exponent(model, 1.0, (10, 1000))
            assert abs(gh - gamma) < 0.05, (model.label, gh)

    _, elapsed = timed(check)
    assert elapsed < 5.0, f"runtime {elapsed:.1f}s"


def test_c03_closed_vs_numeric_lkernel():
    """Closed-form observation kernels equal the line-inversion tables."""

    def check():
        worst = 0.0
        for nu in (1.0, 0.5):
            model = mm.power(nu)
            for m in (1, 2):
                K = kk.build_gaussian_jackknife_kernel(m)
                Kz = kk.build_exp_zero_kernel(m)
                for h in (0.2, 0.5):
                    closed = lk.lkernel_closed_beta(nu, m, h)
                    numeric = lk.lkernel_numeric(model, K, 0.0, h,
                                                 prefer_closed=False)
                    ys = np.geomspace(0.02, 8.0, 200)
                    gap = np.max(np.abs(closed.evaluate(1.0, ys)
                                        - numeric.evaluate(1.0, ys)))
                    assert gap < 1e-6, ("point", nu, m, h, gap)
                    worst = max(worst, gap)

                    s = nu / 2.0
                    closed0 = lk.lkernel_closed_beta_zero(nu, m, s, h)
                    numeric0 = lk.lkernel_zero_numeric(model, Kz, s, h,
                                                       prefer_closed=False)
                    y0 = np.concatenate(
                        [[0.0], np.geomspace(1e-5, 10.0 * (m + 1) * h, 199)])
                    gap0 = np.max(np.abs(closed0.evaluate0(y0)
                                         - numeric0.evaluate0(y0)))
                    assert gap0 < 1e-6, ("zero", nu, m, h, gap0)
                    worst = max(worst, gap0)
        return worst

    worst, elapsed = timed(check)
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s"
    print(f"[c03] worst sup gap {worst:.2e}, {elapsed:.1f}s")


def test_c04_averaging_identity():
    """E L(x0, Y) under the noisy law equals the kernel-smoothed clean density."""

    def check():
        h, x0 = 0.3, 1.0
        L = lk.lkernel_closed_beta(1.0, 1, h)
        K = kk.build_gaussian_jackknife_kernel(1)
        # Y = X * U with X ~ Exp(1) has density E1(y), the exponential integral
        lhs, _ = integrate.quad(
            lambda t: L.evaluate(x0, math.exp(t)) * special.exp1(math.exp(t))
            * math.exp(t), -8.0, 8.0, limit=400)
        rhs, _ = integrate.quad(
            lambda u: K.evaluate(u) * math.exp(u * h - math.exp(u * h)),
            -40.0, 40.0, limit=400)
        assert abs(lhs - rhs) < 1e-6 * abs(rhs), (lhs, rhs)
        return abs(lhs - rhs) / abs(rhs)

    rel, elapsed = timed(check)
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s"
    print(f"[c04] identity rel gap {rel:.2e}")


def test_c05_kernel_moment_suite():
    """Every kernel family has unit mass and m vanishing moments."""

    def check():
        for m in (1, 2, 3):
            fams = [kk.build_flat_kernel(m, 2),
                    kk.build_gaussian_jackknife_kernel(m),
                    kk.build_supersmooth_kernel(m, 2),
                    kk.build_exp_zero_kernel(m)]
            for K in fams:
                assert abs(kk.kernel_moments(K, 0) - 1.0) < 1e-10, \
                    (K.family, m)
                for k in range(1, m + 1):
                    mom = kk.kernel_moments(K, k)
                    assert abs(mom) < 1e-8, (K.family, m, k, mom)

    _, elapsed = timed(check)
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s"


def test_c06_point_risk_sweep(fig_point_left):
    """Median error falls strictly in n; log-log slope in [-0.5, -0.05]."""
    report, elapsed = fig_point_left
    assert elapsed < 300.0, f"runtime {elapsed:.1f}s"
    medians = [r.median for r in report.rows]
    assert all(a > b for a, b in zip(medians, medians[1:])), medians
    fit = sim.rate_regression(report)
    assert -0.5 <= fit.slope <= -0.05, fit
    print(f"[c06] medians {['%.4g' % v for v in medians]}, "
          f"slope {fit.slope:.3f}, {elapsed:.1f}s")


def test_c07_point_risk_across_x0():
    """With n fixed, the error at x0=1.7 sits below the error at x0=0.3."""

    def build():
        spec = sim.SimulationSpec(target=sim.exponential_target(1.0),
                                  model=mm.uniform(1.0), n_grid=(500,),
                                  points=(0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 1.7),
                                  runs=200, oracle_runs=300, seed=SEED)
        return sim.monte_carlo_risk(spec)

    report, elapsed = timed(build)
    assert elapsed < 180.0, f"runtime {elapsed:.1f}s"
    med = {r.x0: r.median for r in report.rows}
    assert med[1.7] < med[0.3], med
    print(f"[c07] med(0.3)={med[0.3]:.4g} med(1.7)={med[1.7]:.4g}, "
          f"{elapsed:.1f}s")


def test_c08_origin_risk_sweep(fig_zero):
    """Origin error decreases in n for both noise shapes; the lighter noise
    (shape 1) beats shape 1/2 at n=1000."""
    reports, elapsed = fig_zero
    assert elapsed < 300.0, f"runtime {elapsed:.1f}s"
    med = {nu: {r.n: r.median for r in rep.rows}
           for nu, rep in reports.items()}
    for nu in (1.0, 0.5):
        seq = [med[nu][n] for n in N_GRID]
        assert all(a > b for a, b in zip(seq, seq[1:])), (nu, seq)
    assert med[1.0][1000] < med[0.5][1000], med
    print(f"[c08] shape-1 medians {['%.4g' % med[1.0][n] for n in N_GRID]}, "
          f"shape-1/2 {['%.4g' % med[0.5][n] for n in N_GRID]}, "
          f"{elapsed:.1f}s")


def test_c09_origin_rate_window(fig_zero):
    """Origin-case rate slope lands in [-0.5, -0.1] for the shape-1 run."""
    reports, _ = fig_zero
    fit = sim.rate_regression(reports[1.0])
    assert -0.5 <= fit.slope <= -0.1, fit
    print(f"[c09] slope {fit.slope:.3f} residual {fit.residual:.3f}")


def test_c10_bandwidth_unit_values():
    """Tuning rules reproduce their closed formulas to 1e-10."""

    def check():
        h_smooth = es.bandwidth_smooth(1.0, 1.0, 1.0, 1000)
        assert abs(h_smooth - 4000.0 ** -0.2) < 1e-10
        _, h_zero, _ = es.bandwidth_zero(1.0, 1.0, 1.0, 0.0, 0.0, 1000)
        assert abs(h_zero - (math.log(1000.0) / 1000.0) ** (1.0 / 3.0)) < 1e-10

    _, elapsed = timed(check)
    assert elapsed < 1.0, f"runtime {elapsed:.1f}s"


def test_c11_worker_determinism(tmp_path):
    """The simulate command writes byte-identical CSV for 1 and max workers."""
    spec = tmp_path / "spec.toml"
    spec.write_text(
        '[target]\nkind = "exponential"\nrate = 1.0\n\n'
        '[model]\nspec = "uniform:1"\n\n'
        '[campaign]\nn = [100, 300]\npoints = [1.0]\nruns = 50\n'
        f'oracle_runs = 30\nseed = {SEED}\n')
    out1 = tmp_path / "r1.csv"
    out2 = tmp_path / "r2.csv"
    assert cli.run(["simulate", "--spec", str(spec), "--out", str(out1),
                    "--workers", "1"]) == 0
    assert cli.run(["simulate", "--spec", str(spec), "--out", str(out2),
                    "--workers", str(os.cpu_count() or 4)]) == 0
    assert out1.read_bytes() == out2.read_bytes()

"""A small Monte-Carlo risk study, written out as CSV and SVG.

For each sample size the oracle bandwidth is found by minimizing the
empirical MSE over a grid, then replications record |f-hat - f(x0)|.
The campaign is fully seeded: rerunning this script reproduces the report
byte for byte, whatever the worker count.
"""

import pathlib

import melldec as md
import melldec.simulate as sim

spec = sim.SimulationSpec(
    target=sim.exponential_target(1.0),
    model=md.uniform(1.0),
    n_grid=(100, 300, 1000, 3000),
    points=(1.0,),
    runs=100,
    oracle_runs=100,
    seed=7,
)

report = sim.monte_carlo_risk(spec)
print("n      h*       q25        median     q75")
for r in report.rows:
    print(f"{r.n:<6} {r.h_star:.4f}   {r.q25:.5f}    {r.median:.5f}    "
          f"{r.q75:.5f}")

fit = sim.rate_regression(report)
print(f"\nlog-log rate fit: slope {fit.slope:.3f} "
      f"(residual {fit.residual:.3f})")
print("the slope tracks -beta/(2 beta + 2 gamma + 1) for the effective")
print("smoothness the kernel order can exploit.")

out = pathlib.Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
(out / "risk_report.csv").write_text(report.to_csv())
(out / "risk_boxplot.svg").write_text(sim.render_boxplot_svg(report))
print(f"\nwrote {out / 'risk_report.csv'} and {out / 'risk_boxplot.svg'}")

# %% [markdown]
# Constant coefficients (b = c = f = 1): error against the closed form
#
# The error should fall on a straight line in a semilog plot and the lines
# for the three parameter pairs should nearly coincide.

# %%
import sys
from pathlib import Path

from sblfem.harness import PAPER_PAIRS, SweepConfig, emit_svg_semilog, fit_rate, group_by_pair, run_sweep

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

records = run_sweep(SweepConfig("example1", PAPER_PAIRS, error_mode="exact"))

# %%
for (e1, e2), rows in group_by_pair(records).items():
    print(f"eps1={e1:g} eps2={e2:g}")
    for r in rows:
        print(f"   p={r.p:2d} DOF={r.dof:2d} err={r.rel_err_pct:.3e} %")
    fit = fit_rate(rows, p_min=2)
    print(f"   sigma_hat={fit.sigma_hat:.3f}  R^2={fit.r_squared:.4f}")

# %%
svg = emit_svg_semilog(records, out / "example1.svg", "constant coefficients")
print("wrote", svg)

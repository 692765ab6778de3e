# %% [markdown]
# # Nested counts and the limsup-fractal condition
#
# M_n(I) counts the level-n subintervals of a level-m interval I that are
# fast. Indicators further apart than n 2^-n are independent, which bounds
# Var M_n(I) by (2n+1) p_n 2^(n-m). The dimension lower bound needs
# 2^((gamma-1) n) (2n+1) / p_n -> 0.

# %%
from fastpoints.limsup import absorption_table, dimension_condition, variance_report

for m, n in ((6, 12), (8, 14)):
    r = variance_report(3, 200, m, n, 0.5, 0.05)
    print(f"(m,n)=({m},{n}) mean {r.mean_hat:.3f} vs {r.mean_analytic:.3f}   var {r.var_hat:.2f} <= {r.var_bound:.2f}")

# %%
for g in (0.70, 0.74, 0.80, 0.90):
    t = dimension_condition(g, 0.5, 0.01)
    print(g, t.verdict.value, f"{t.values[0]:.3g} -> {t.values[-1]:.3g}")

# the modulus term is absorbed only at levels far beyond desk scale
print(absorption_table([10, 20, 100, 400], 0.5, 0.05, 1.5))

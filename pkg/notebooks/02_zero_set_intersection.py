# %% [markdown]
# # Fast times that are also near-zero times
#
# Near-zero flags test |B| at the left endpoint against c sqrt(m 2^-m log 2).
# Intersecting them with the sup-oscillation flags counts intervals that are
# both fast and near the zero set. The intersection exponent should track
# max(1/2 - a^2, 0).

# %%
import numpy as np

from fastpoints.detect import count, default_zero_c, expected_zero_count, intersect_flags, sup_flags, zero_near_flags
from fastpoints.ensemble import path_seeds
from fastpoints.paths import sample_bm
from fastpoints.scaling import dim_fast_zero, fit_exponent

c = default_zero_c(None)  # 2 sqrt 2 for zero drift
levels = list(range(8, 14))
seeds = path_seeds(7, 60)

# %%
zero, inter = [], []
for s in seeds:
    p = sample_bm(s, 16)
    z = [zero_near_flags(p, j, c) for j in levels]
    zero.append([count(f) for f in z])
    inter.append([count(intersect_flags(f, sup_flags(p, j, 0.4))) for f, j in zip(z, levels)])
zero, inter = np.mean(zero, axis=0), np.mean(inter, axis=0)

for j, zc, ic in zip(levels, zero, inter):
    print(f"j={j:2d}  near-zero {zc:8.2f} (exact {expected_zero_count(j, c):8.2f})   fast and near zero {ic:7.2f}")

# %%
print("near-zero slope ", fit_exponent(levels, zero, "SQRT_LOG").slope, "target 0.5")
print("intersect slope ", fit_exponent(levels, inter).slope, "target", dim_fast_zero(0.4).value)

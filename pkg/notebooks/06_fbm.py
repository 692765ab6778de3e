# %% [markdown]
# # Fractional Brownian motion
#
# Circulant embedding gives exact fBm on the dyadic grid. Increments scale as
# h^(2H); fast-time thresholds use the matching w^H normalisation.

# %%
import numpy as np

from fastpoints.detect import count, l_flags
from fastpoints.ensemble import path_seeds
from fastpoints.paths import fgn_autocovariance, sample_fbm
from fastpoints.scaling import dim_fbm_cantor_drift, fit_exponent

print("r(1) at H=0.7:", fgn_autocovariance(0.7, [1])[0])

lags = [2**k for k in range(7)]
for H in (0.3, 0.5, 0.7):
    m2 = np.mean([[np.mean((v[d:] - v[:-d]) ** 2) for d in lags] for v in (sample_fbm(s, H, 11).values for s in path_seeds(1, 40))], axis=0)
    slope = np.polyfit(np.log(np.array(lags) * 2.0**-11), np.log(m2), 1)[0]
    print(f"H={H}  increment slope {slope:.3f} (2H = {2 * H})")

# %%
levels = list(range(7, 12))
c = np.mean([[count(l_flags(sample_fbm(s, 0.7, 11), m, 0.5)) for m in levels] for s in path_seeds(2, 40)], axis=0)
print("H=0.7 fast-count slope", fit_exponent(levels, c, "SQRT_LOG").slope)
print(dim_fbm_cantor_drift(0.5, 0.6, 0.7), dim_fbm_cantor_drift(0.5, 0.5, 0.5))

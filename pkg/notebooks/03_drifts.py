# %% [markdown]
# # Drifts: Cantor staircase and Loud's lacunary series
#
# A drift that is 1/2-Hölder with coefficient c0 can only shift fast-time
# thresholds by c0 / sqrt(2 log(1/h)), which gives an exact per-path
# sandwich of flag sets. Rougher drifts, such as a thin Cantor staircase,
# have reverse-Hölder points that create new fast times of their own.

# %%
import math

from fastpoints.detect import holder_sandwich
from fastpoints.drift import Cantor, Loud, cantor_components, default_gamma1, holder_coefficient, reverse_holder_witness
from fastpoints.paths import apply_drift, sample_bm
from fastpoints.scaling import dim_cantor, dim_fast_cantor_drift

f = Cantor(0.25)
c0 = holder_coefficient(f, 0.5, 12)
print("grid 1/2-Hölder coefficient of the 1/4-Cantor function:", c0)

p = sample_bm(5, 12)
x = apply_drift(p, f)
for m in range(6, 13):
    r = holder_sandwich(p, f, m, 0.6, c0, drifted=x)
    print(f"m={m:2d} delta {r.delta:.3f}  |B(a+d)| {r.inner.count():4d} <= |X(a)| {r.middle.count():4d} <= |B(a-d)| {r.outer.count():4d}")

# %% [markdown]
# For gamma < 1/4 the staircase is rougher than Brownian motion at the left
# ends of its components.

# %%
gamma = 1 / 9
g1 = 0.15  # default_gamma1 would give the midpoint of (gamma, 1/4)
beta = math.log(g1) / (2 * math.log(gamma))
print("beta", beta, "default gamma1", default_gamma1(gamma))
t = float(cantor_components(gamma, 4).left[5])
for ell in range(6):
    print(ell, reverse_holder_witness(Cantor(gamma), beta, math.sqrt(g1), t, gamma**ell, 32))
print("dimension of fast times with this drift at a=0.95:", dim_fast_cantor_drift(0.95, gamma).value, dim_cantor(gamma).value)

# %%
g = Loud(0.4, 2, 5)
hits = sum(reverse_holder_witness(g, 0.45, 0.1, t, 2.0**-6, 24) is not None for t in (0.1, 0.33, 0.5, 0.77))
print("Loud witnesses found at", hits, "of 4 points")

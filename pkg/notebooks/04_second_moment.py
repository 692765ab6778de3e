# %% [markdown]
# # Second-moment method on discrete measures
#
# J sums, over the atoms of a measure, the event that the path is within h of
# the drift and then makes an a-fast move. Its first two moments feed the
# Paley-Zygmund inequality P(J > 0) >= (EJ)^2 / EJ^2.

# %%
from fastpoints.measures import (
    a_eta,
    cantor_natural_measure,
    energy,
    j_mu_estimate,
    j_mu_exact_mean_a0,
    lemma_bound,
    paley_zygmund_check,
    phi,
    s_h,
    uniform_measure,
)

mu = cantor_natural_measure(0.25, 8)
A = a_eta(mu, 0.55, range(1, 19), 12)
for ell in (4, 6, 8, 10):
    h = 2.0**-ell
    print(f"h=2^-{ell}  S_h {s_h(mu, h):.4f}  bound {lemma_bound(A, 0.55, h):.4f}")

# energy below the dimension 1/2 settles, above it keeps growing
for n in (4, 6, 8):
    nu = cantor_natural_measure(0.25, n)
    print(n, round(energy(nu, 0.4), 4), round(energy(nu, 0.6), 4))

# %%
leb = uniform_measure(1024)
h = 2.0**-8
est0 = j_mu_estimate(1, 400, 12, leb, h, 0.0)
print("a=0  EJ", est0.ej, "+-", est0.stderr_ej, " exact", j_mu_exact_mean_a0(leb, 12, h))

est = j_mu_estimate(2, 400, 12, leb, h, 0.3)
print("a=0.3  P(J>0)", est.p_positive, " PZ lower", est.pz_lower, paley_zygmund_check(est))
print("EJ / (h Phi) =", est.ej / (h * phi(h, 0.3)))

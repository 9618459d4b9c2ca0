# %% [markdown]
# The circle of semi-stable limits F_{alpha, Delta}.
#
# For fixed alpha the offset Delta runs over [0, h) and the two ends glue
# together when alpha != 1.  At alpha = 1 the ends differ by a unit drift.

# %%
import numpy as np

from latticeprod.limitlaw import SemiStableLaw

u = np.linspace(-5, 5, 201)
for alpha in (0.5, 1.0, 1.419):
    a = SemiStableLaw(alpha, 0.0).log_cf(u)
    b = SemiStableLaw(alpha, 1.0).log_cf(u)
    gap = np.max(np.abs(SemiStableLaw(alpha, 0.0).cf(u) - SemiStableLaw(alpha, 0.5).cf(u)))
    print(f"alpha={alpha:5.3f}  |log phi(0) - log phi(h)| = {np.max(np.abs(a - b)):.2e}"
          f"  sup |phi_0 - phi_1/2| = {gap:.3f}")

# %% [markdown]
# Semi-stability: |phi(u)|^(e^{alpha h}) equals |phi(e^h u)|.  A perturbed
# exponent breaks the identity.

# %%
for alpha in (0.5, 1.0, 1.419):
    law = SemiStableLaw(alpha, 0.3)
    print(f"alpha={alpha}: defect {law.semistability_defect(u):.1e},"
          f" perturbed {law.semistability_defect(u, a_factor=1.01):.1e}")

# %% [markdown]
# Distribution functions on a coarse grid, with the reported inversion error.

# %%
x = np.linspace(-5, 20, 11)
for alpha in (0.5, 1.0, 1.5):
    F, err = SemiStableLaw(alpha, 0.0).cdf(x, return_error=True)
    print(f"alpha={alpha}: err={err:.1e}", np.round(F, 4))

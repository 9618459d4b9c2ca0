# %% [markdown]
# Sums of random products Z_n = sum_{i <= N_n} exp(S_{i,n}) for a fair coin.
#
# With N_n = exp(lambda n) and lambda = 0.2 the index is alpha ~ 1.419.  Along
# n with {b_n} near 0 the normalized sums approach F_{alpha, 0}; along {b_n}
# near 1/2 they approach a different law F_{alpha, 1/2}.

# %%
import math

import numpy as np

from latticeprod.cumulant import bernoulli, profile
from latticeprod.montecarlo import sample_zn
from latticeprod.rowarray import compare_cf, condition_table, limit_law_for
from latticeprod.scheme import build_scheme, find_subsequence

prof = profile(bernoulli(0.5))
scheme = build_scheme(prof, 0.2, 2000)
print(f"alpha = {scheme.alpha:.6f}, case = {scheme.case}")

# %% [markdown]
# Conditions on the row array along the Delta = 0 subsequence.

# %%
hits = find_subsequence(scheme, 0.0, 0.02)
for row in condition_table(None, scheme, math.sqrt(math.e), hits[::10] + hits[-1:]):
    m = row.moments
    print(f"n={m.n:5d} tail={m.tail:.5f} (limit {row.limit_tail:.5f})"
          f" shift={m.trunc_mean_centered:+.5f} (limit {row.limit_shift:+.5f})")

# %% [markdown]
# Characteristic functions: convergence within a subsequence, a persistent gap
# across subsequences.

# %%
n0 = hits[-1]
n5 = find_subsequence(scheme, 0.5, 0.02)[-1]
print("own  :", compare_cf(None, scheme, n0).sup_err, compare_cf(None, scheme, n5).sup_err)
print("cross:", compare_cf(None, scheme, n0, limit_delta=0.5).sup_err,
      compare_cf(None, scheme, n5, limit_delta=0.0).sup_err)

# %% [markdown]
# Monte Carlo at lambda = 0.25, largest n with N_n <= 1e5.

# %%
s25 = build_scheme(prof, 0.25, 80)
n = max(m for m in s25.valid_ns if s25.record(m).N <= 10**5)
run = sample_zn(None, s25, n, 10**4, seed=1, law=limit_law_for(s25, n))
print(f"n={n} N={s25.record(n).N} KS={run.ks_distance:.4f}"
      f" quantiles={np.round(np.quantile(run.samples, [0.1, 0.5, 0.9]), 3)}")

# %% [markdown]
# # Conditional versus marginal odds-ratios
#
# A treatment with the same conditional log odds-ratio in every stratum of
# ``x`` has a smaller log odds-ratio once the strata are pooled. Nothing is
# confounded here. The gap comes only from how different the baseline risks
# of the two strata are.

# %%
import math

import numpy as np

from offsetcate.causal import collapsibility_pipeline

# %%
for label, b0 in (("a", {0: -1.5, 1: 0.5}), ("b", {0: -3.5, 1: 2.5})):
    rows = collapsibility_pipeline(b0, beta_t=1.0, p_x1=0.5)
    for r in rows:
        print(f"{label} x={r.x}  pi0(x)={r.pi0_x:.3f}  pi1(x)={r.pi1_x:.3f}")
    r = rows[0]
    print(f"{label} pooled  pi0={r.pi0:.3f}  pi1={r.pi1:.3f}  gamma={r.gamma_t:.3f}\n")

# %% [markdown]
# Widen the baseline spread and the marginal effect keeps shrinking toward
# zero while the conditional coefficient stays at 1.

# %%
for spread in np.linspace(0, 12, 7):
    g = collapsibility_pipeline({0: -0.5 - spread / 2, 1: -0.5 + spread / 2}, 1.0, 0.5)[0].gamma_t
    print(f"spread {spread:5.1f}  marginal log OR {g:.4f}")

# %% [markdown]
# An extreme case: the treatment doubles the odds in both strata, yet the
# pooled risks barely move.

# %%
logit = lambda p: math.log(p / (1 - p))
b_t = logit(0.02) - logit(0.01)
r = collapsibility_pipeline({0: logit(0.01), 1: logit(0.98)}, b_t, 0.5)[0]
print(f"conditional OR {math.exp(b_t):.3f}, pooled risks {r.pi0:.3f} / {r.pi1:.3f}, "
      f"marginal OR {math.exp(r.gamma_t):.3f}")

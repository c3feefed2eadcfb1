# %% [markdown]
# # Fixing the treatment coefficient in a confounded model
#
# Without covariates, a logistic model fitted to confounded data recovers
# neither the baseline nor the treatment coefficient. Fixing the treatment
# coefficient at its interventional value (an offset) and fitting only the
# intercept gets much closer.

# %%
import numpy as np

from offsetcate import experiments as ex
from offsetcate.dgm import build_joint, example1_table
from offsetcate.estimators import fit_mle
from offsetcate.likelihood import (
    ModelParams,
    alt_baseline_solution,
    cate_of,
    grad_at_truth_from_probs,
)

# %%
for r in ex.run_example1(resolution=3):
    print(
        f"OR_u {r.or_u:4g}: truth ({r.beta0_star:+.4f}, {r.beta_t_star:.4f})  "
        f"full ({r.full.params.beta0:+.4f}, {r.full.params.beta_t:.4f})  "
        f"offset beta0 {r.offset.params.beta0:+.4f}"
    )

# %% [markdown]
# With symmetric centred coding the offset intercept lands exactly on the
# truth, because the two confounding terms of the score cancel. For a
# general mechanism they do not, and the true intercept is not a stationary
# point of the likelihood.

# %%
q, pi = (0.2, 0.8), [[0.3, 0.6], [0.5, 0.9]]
print("score at the true intercept:", grad_at_truth_from_probs(0.5, q, pi))
table = example1_table(0.5, q, pi)
b0 = np.log(0.45 / 0.55)
bt = np.log(0.7 / 0.3) - b0
fit = fit_mle(table, ModelParams(0.0, bt, 0.0, free=(True, False, False)))
print(f"true intercept {b0:+.4f}, offset fit {fit.params.beta0:+.4f}")

# %% [markdown]
# The CATE alone cannot pin the intercept down either: two intercepts give the
# same absolute effect.

# %%
alt = alt_baseline_solution(b0, bt)
print(f"CATE at {b0:+.4f}: {cate_of(b0, bt):.6f}; at {alt:+.4f}: {cate_of(alt, bt):.6f}")

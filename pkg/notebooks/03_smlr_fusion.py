# %% [markdown]
# # Fusing models without labels
# Four models see the same target through noise of different size. Their
# covariance off the diagonal is rank one, which is enough to tell the good
# ones from the bad ones without looking at the target.

# %%
import numpy as np

from emofuse.fusion import PredictionSet, estimate_accuracies, prediction_covariance, smlr_fuse
from emofuse.metrics import ccc, mse

rng = np.random.default_rng(1)
y = rng.standard_normal(5000)
sigmas = (0.1, 0.2, 0.4, 0.8)
P = np.array([y + s * rng.standard_normal(y.size) for s in sigmas])

# %% off-diagonal entries all sit near var(y); the diagonal carries the noise
print(np.round(prediction_covariance(P), 3))

# %%
est = estimate_accuracies(P)
for s, r, n, a in zip(sigmas, est.loadings, est.noise_var, est.accuracy):
    print(f"sigma {s:.1f}: loading {r:.3f}  noise var {n:.4f} (true {s * s:.4f})  accuracy {a:8.2f}")

# %%
res = smlr_fuse(PredictionSet(("m1", "m2", "m3", "m4"), tuple(range(y.size)), P))
print("weights:", np.round(res.weights, 3))
for name, p in zip(res.model_names, P):
    print(f"{name}: CCC {ccc(y, p):.4f}  MSE {mse(y, p):.4f}")
print(f"fused: CCC {ccc(y, res.fused):.4f}  MSE {mse(y, res.fused):.4f}")

# %% plain averaging for comparison
print(f"mean of models: MSE {mse(y, P.mean(axis=0)):.4f}")

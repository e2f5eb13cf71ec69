# %% [markdown]
# # Ranking features and picking an SVR
# Features of the synthetic mini-dataset are clipped and scaled on the train
# split, ranked with RReliefF, and a small grid over the number of top
# features and SVR hyperparameters is scored by validation CCC.

# %%
import tempfile
from pathlib import Path

import numpy as np

from emofuse.aggregate import FEATURE_NAMES, extract_features
from emofuse.dataset import load_manifest, read_wav
from emofuse.preprocess import fit_scaler, transform
from emofuse.relieff import rrelieff
from emofuse.svr import SvrGrid, model_select
from emofuse.synthetic import make_mini_dataset

root = Path(tempfile.mkdtemp())
manifest = load_manifest(make_mini_dataset(root, n_train=40, n_val=20, n_test=0))
X = np.array([extract_features(read_wav(u.wav_path)) for u in manifest])
y = np.array([u.arousal for u in manifest])
train = np.array([u.split == "train" for u in manifest])

# %% scaler fitted on train only; validation rows are clipped into [0, 1] too
scaler = fit_scaler(X[train])
Xs = transform(X, scaler)
print("scaled range:", Xs.min(), Xs.max())

# %% the pitch and energy statistics should come out on top for arousal
ranking = rrelieff(Xs[train], y[train])
for i in ranking.order[:8]:
    print(f"{FEATURE_NAMES[i]:22s} {ranking.weights[i]: .4f}")

# %%
grid = SvrGrid(ks=(5, 10, 20, 40, 76), Cs=(1.0, 10.0), epsilons=(0.01, 0.1), gammas=(0.1, None))
sel = model_select(Xs[train], y[train], Xs[~train], y[~train], ranking, grid)
print("picked k=%d, C=%g, eps=%g, gamma=%.4g, validation CCC %.3f"
      % (sel.k, sel.hyper.C, sel.hyper.epsilon, sel.hyper.gamma, sel.val_ccc))
print("support vectors:", len(sel.model.beta), "KKT violation %.1e" % sel.model.kkt_violation)

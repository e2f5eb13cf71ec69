# %% [markdown]
# # The whole pipeline through the command line
# synth -> extract -> train -> predict -> fuse -> eval, the same calls the
# `emofuse` console script makes.

# %%
import shutil
import tempfile
from pathlib import Path

from emofuse.cli import main
from emofuse.formats import read_report

root = Path(tempfile.mkdtemp())
data, man = root / "data", str(root / "data" / "manifest.csv")

main(["synth", "--out", str(data)])
main(["extract", "--manifest", man, "--out", str(root / "features.csv")])
main(["train", "--manifest", man, "--features", str(root / "features.csv"), "--out", str(root / "models")])

# %% the audio model's predictions join the simulated video models as peers
shutil.copytree(data / "peers", root / "preds")
main(["predict", "--models", str(root / "models"), "--features", str(root / "features.csv"),
      "--out", str(root / "preds")])
main(["fuse", "--predictions", str(root / "preds"), "--manifest", man, "--split", "validation",
      "--out", str(root / "fused")])
main(["eval", "--manifest", man, "--predictions", str(root / "preds"), "--predictions", str(root / "fused"),
      "--out", str(root / "report.csv")])

# %%
for row in read_report(root / "report.csv"):
    print(f"{row['model']:12s} {row['target']:8s} CCC {float(row['ccc']):.3f}  MSE {float(row['mse']):.4f}")
print((root / "fused" / "smlr_arousal_weights.csv").read_text())

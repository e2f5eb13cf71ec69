# %% [markdown]
# # Audio features, frame by frame
# A synthetic voiced tone with pauses goes through framing, the low-level
# descriptors, the cepstral descriptors and finally the 76-entry summary.

# %%
import numpy as np

from emofuse.aggregate import FEATURE_NAMES, extract_features
from emofuse.cepstral import cepstral_features
from emofuse.dataset import Signal, frame_signal
from emofuse.lowlevel import lowlevel_features
from emofuse.synthetic import synth_utterance

rng = np.random.default_rng(0)
calm = Signal(synth_utterance(0.15, -0.4, rng))
excited = Signal(synth_utterance(0.85, 0.5, rng))

# %% 200-sample windows every 80 samples at 16 kHz
fs = frame_signal(excited)
print(len(fs), "frames of", fs.frames.shape[1], "samples")

# %% per-frame descriptors
low = lowlevel_features(fs)
cep = cepstral_features(fs)
voiced = low.pitch > 0
print("voiced frames: %.0f%%" % (100 * voiced.mean()))
print("median pitch over voiced frames: %.1f Hz" % np.median(low.pitch[voiced]))
print("first frame formants:", np.round(cep.formants[voiced][0]))

# %% utterance summary: arousal shows up in pitch, energy and pauses
a, b = extract_features(calm), extract_features(excited)
for name in ("f10_pitch_mean", "f08_energy_mean", "f12_silence_ratio", "f00_centroid_mean"):
    i = FEATURE_NAMES.index(name)
    print(f"{name:20s} calm {a[i]:10.4f}   excited {b[i]:10.4f}")

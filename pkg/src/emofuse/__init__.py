"""Audio emotion regression features, RReliefF/SVR modelling and SMLR fusion."""

from .aggregate import FEATURE_GROUPS, FEATURE_NAMES, N_FEATURES, extract_features
from .dataset import FrameConfig, Signal, frame_signal, load_manifest, read_wav
from .fusion import PredictionSet, estimate_accuracies, smlr_fuse, spectral_loadings
from .metrics import ccc, mse, pearson
from .preprocess import fit_scaler, transform
from .relieff import RReliefFParams, rrelieff, top_k
from .svr import SvrGrid, SvrHyper, model_select, predict, train_svr

__version__ = "0.1.0"

"""Pipeline configuration read from a flat ``key = value`` file.

Lists are comma separated; ``#`` starts a comment. In ``svr_gammas`` the
token ``1/d`` means one over the number of selected features.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .aggregate import ExtractionConfig
from .dataset import FrameConfig
from .relieff import RReliefFParams
from .svr import DEFAULT_KS, SvrGrid


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    window_len: int = 200
    hop: int = 80
    band_split_hz: float = 2000.0
    pitch_min_hz: float = 50.0
    pitch_max_hz: float = 500.0
    voicing_threshold: float = 0.3
    clip_low: float = 2.0
    clip_high: float = 98.0
    relieff_k: int = 10
    relieff_sigma: float = 20.0
    relieff_m: int | None = None
    seed: int = 0
    svr_kernel: str = "rbf"
    svr_ks: tuple = DEFAULT_KS
    svr_Cs: tuple = (0.1, 1.0, 10.0, 100.0)
    svr_epsilons: tuple = (0.01, 0.1)
    svr_gammas: tuple = (0.01, 0.1, None)
    exclude_arousal: tuple = ()
    exclude_valence: tuple = ()
    manifest: str | None = None
    features: str | None = None
    models: str | None = None
    predictions: str | None = None
    out: str | None = None

    def __post_init__(self):
        if not 0 < self.hop <= self.window_len:
            raise ConfigError("need 0 < hop <= window_len")
        if not 0 <= self.clip_low <= self.clip_high <= 100:
            raise ConfigError("need 0 <= clip_low <= clip_high <= 100")
        if not 0 < self.pitch_min_hz < self.pitch_max_hz:
            raise ConfigError("need 0 < pitch_min_hz < pitch_max_hz")
        if self.relieff_k < 1 or self.relieff_sigma <= 0:
            raise ConfigError("relieff_k must be >= 1 and relieff_sigma > 0")
        if self.svr_kernel not in ("linear", "rbf"):
            raise ConfigError(f"unknown svr_kernel {self.svr_kernel!r}")
        if not (self.svr_ks and self.svr_Cs and self.svr_epsilons and self.svr_gammas):
            raise ConfigError("SVR grids must be non-empty")

    @property
    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(
            FrameConfig(self.window_len, self.hop),
            self.band_split_hz,
            self.pitch_min_hz,
            self.pitch_max_hz,
            self.voicing_threshold,
        )

    @property
    def relieff(self) -> RReliefFParams:
        return RReliefFParams(self.relieff_m, self.relieff_k, self.relieff_sigma, self.seed)

    @property
    def grid(self) -> SvrGrid:
        return SvrGrid(self.svr_ks, self.svr_Cs, self.svr_epsilons, self.svr_gammas, self.svr_kernel)

    def exclusions(self, target) -> tuple:
        return {"arousal": self.exclude_arousal, "valence": self.exclude_valence}[target]


def _gamma(tok):
    return None if tok.replace(" ", "") == "1/d" else float(tok)


def _list(conv):
    return lambda text: tuple(conv(t.strip()) for t in text.split(",") if t.strip())


def _optional_int(text):
    return None if text.lower() in ("", "none", "all") else int(text)


_PARSERS = {
    "window_len": int,
    "hop": int,
    "band_split_hz": float,
    "pitch_min_hz": float,
    "pitch_max_hz": float,
    "voicing_threshold": float,
    "clip_low": float,
    "clip_high": float,
    "relieff_k": int,
    "relieff_sigma": float,
    "relieff_m": _optional_int,
    "seed": int,
    "svr_kernel": str,
    "svr_ks": _list(int),
    "svr_Cs": _list(float),
    "svr_epsilons": _list(float),
    "svr_gammas": _list(_gamma),
    "exclude_arousal": _list(str),
    "exclude_valence": _list(str),
    "manifest": str,
    "features": str,
    "models": str,
    "predictions": str,
    "out": str,
}


def parse_config(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return replace(base or PipelineConfig(), **values)


def load_config(path, base: PipelineConfig | None = None) -> PipelineConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base)


def dump_config(cfg: PipelineConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if isinstance(v, tuple):
            v = ", ".join("1/d" if x is None else str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"

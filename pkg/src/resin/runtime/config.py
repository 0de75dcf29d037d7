"""Engine configuration and its key-value file format.

The file is INI-like: ``key = value`` lines, ``#`` comments, an optional
``[engine]`` header.  Recognised keys::

    h                   partition width in Hz (default 5.0)
    epsilon             change threshold in weight space (default 0.001)
    hysteresis          confirmations before a structural move (default 2)
    max_band            highest band index; larger rates are clipped (default 8, none disables)
    adapt_interval      seconds between policy runs; 0 runs it after every update (default 0)
    max_sources         enumeration limit per target (default 24)
    equality_halfwidth  interval half width for Density ``==`` (default 0.001)
    semiring            probability | max-times (default probability)
    kalman_delta_t      filter step (default 1.0)
    kalman_q            two comma-separated process noise terms (default 1e-4, 1e-4)
    kalman_r            measurement noise (default 0.01)
    kalman_x0           initial interval and drift (default 1.0, 0.0)
    kalman_p0           initial covariance diagonal (default 1.0, 1.0)
    kalman_floor        smallest interval in seconds (default 1e-4)
    kalman_gate         innovation gate in standard deviations (default none)
    queue_bound         per-channel bus queue length (default 1024)
    bridge_host         socket bridge address (default 127.0.0.1)
    bridge_port         socket bridge port (default 7411)
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

from resin.foc import ConfigError, KalmanConfig
from resin.semiring import SEMIRINGS


@dataclass(frozen=True)
class EngineConfig:
    h: float = 5.0
    epsilon: float = 1e-3
    hysteresis: int = 2
    max_band: int | None = 8
    adapt_interval: float = 0.0
    max_sources: int = 24
    equality_halfwidth: float = 1e-3
    semiring: str = "probability"
    kalman: KalmanConfig = field(default_factory=KalmanConfig)
    queue_bound: int = 1024
    bridge_host: str = "127.0.0.1"
    bridge_port: int = 7411

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise ConfigError(f"h must be positive, got {self.h}")
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.hysteresis < 1:
            raise ConfigError(f"hysteresis must be at least 1, got {self.hysteresis}")
        if self.max_band is not None and self.max_band < 0:
            raise ConfigError(f"max_band must be non-negative, got {self.max_band}")
        if self.adapt_interval < 0:
            raise ConfigError(f"adapt_interval must be non-negative, got {self.adapt_interval}")
        if self.queue_bound < 1:
            raise ConfigError(f"queue_bound must be positive, got {self.queue_bound}")
        if self.semiring not in SEMIRINGS:
            raise ConfigError(f"unknown semiring {self.semiring!r}")

    def with_(self, **changes) -> "EngineConfig":
        return replace(self, **changes)


def _pair(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


_SIMPLE = {f.name: f for f in fields(EngineConfig) if f.name != "kalman"}
_KALMAN = {
    "kalman_delta_t": ("delta_t", float),
    "kalman_q": ("q", _pair),
    "kalman_r": ("r", float),
    "kalman_x0": ("x0", _pair),
    "kalman_p0": ("p0", _pair),
    "kalman_floor": ("floor", float),
    "kalman_gate": ("gate", lambda v: None if v.strip().lower() in ("", "none") else float(v)),
}


def parse_config(text: str) -> EngineConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    lines = [ln.strip() for ln in text.splitlines()]
    first = next((ln for ln in lines if ln and not ln.startswith(("#", ";"))), "")
    if not first.startswith("["):
        text = "[engine]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    values: dict = {}
    kalman: dict = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            try:
                if key in _KALMAN:
                    name, conv = _KALMAN[key]
                    kalman[name] = conv(raw)
                elif key == "max_band":
                    values[key] = None if raw.strip().lower() in ("", "none") else int(raw)
                elif key in ("hysteresis", "max_sources", "queue_bound", "bridge_port"):
                    values[key] = int(raw)
                elif key in ("semiring", "bridge_host"):
                    values[key] = raw.strip()
                elif key in _SIMPLE:
                    values[key] = float(raw)
                else:
                    raise ConfigError(f"unknown configuration key {key!r}")
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return EngineConfig(kalman=KalmanConfig(**kalman), **values)


def load_config(path: str) -> EngineConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

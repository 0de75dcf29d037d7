"""Signal bus, coercion and the per-target engine loop."""

from resin.runtime.bus import Bus, ChannelTypeError, Subscription
from resin.runtime.coerce import CoercionError, coerce
from resin.runtime.config import EngineConfig, load_config, parse_config
from resin.runtime.engine import MODES, Engine, Move, compile_engines, polynomial_engine, start_engines
from resin.runtime.values import Boolean, BusMessage, Density, Number, Probability

__all__ = [
    "MODES",
    "Boolean",
    "Bus",
    "BusMessage",
    "ChannelTypeError",
    "CoercionError",
    "Density",
    "Engine",
    "EngineConfig",
    "Move",
    "Number",
    "Probability",
    "Subscription",
    "coerce",
    "compile_engines",
    "load_config",
    "parse_config",
    "polynomial_engine",
    "start_engines",
]

"""Typed signal values and bus messages."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union


@dataclass(frozen=True)
class Boolean:
    value: bool
    type_name = "Boolean"

    def __post_init__(self) -> None:
        if not isinstance(self.value, bool):
            raise TypeError(f"Boolean value must be a bool, got {self.value!r}")


@dataclass(frozen=True)
class Number:
    value: float
    type_name = "Number"

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float)) or math.isnan(self.value):
            raise TypeError(f"Number value must be a real, got {self.value!r}")


@dataclass(frozen=True)
class Probability:
    value: float
    type_name = "Probability"

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
            raise TypeError(f"Probability value must be a real, got {self.value!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability {self.value} outside [0, 1]")


@dataclass(frozen=True)
class Density:
    """Univariate Gaussian density."""

    mean: float
    stddev: float
    type_name = "Density"

    def __post_init__(self) -> None:
        if not self.stddev > 0 or math.isinf(self.stddev) or math.isnan(self.mean):
            raise ValueError(f"Density needs a finite mean and positive stddev, got ({self.mean}, {self.stddev})")


TypedValue = Union[Boolean, Number, Probability, Density]
TYPES: dict[str, type] = {t.type_name: t for t in (Boolean, Number, Probability, Density)}


@dataclass(frozen=True)
class BusMessage:
    channel: str
    value: TypedValue
    timestamp: float
    seq: int = 0

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"channel": self.channel, "type": self.value.type_name}
        if isinstance(self.value, Density):
            doc["mean"] = self.value.mean
            doc["stddev"] = self.value.stddev
        else:
            doc["value"] = self.value.value
        doc["timestamp"] = self.timestamp
        return doc

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "BusMessage":
        try:
            kind = TYPES[doc["type"]]
            if kind is Density:
                value: TypedValue = Density(float(doc["mean"]), float(doc["stddev"]))
            elif kind is Boolean:
                value = Boolean(doc["value"])
            else:
                value = kind(float(doc["value"]))
            return cls(str(doc["channel"]), value, float(doc["timestamp"]))
        except KeyError as exc:
            raise ValueError(f"message is missing field {exc.args[0]!r}") from None

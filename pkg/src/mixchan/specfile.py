"""JSON channel specification files.

::

    {"orders": [2],
     "weights": {"coset": [{"a": [0], "p": 0.75}, {"a": [1], "p": 0.25}]}}

``"full"`` lists records ``{"a": [...], "b": [...], "w": w}``; ``"coset"``
lists ``{"a": [...], "p": p}`` and spreads p uniformly over the n clock labels
of the coset.  Unlisted labels have weight 0; weights must sum to 1 within
1e-9.  ``"label"`` is an optional free-form name.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import MixedUnitaryChannel
from .group import CyclicOrders, DimensionLimitError

SPEC_SUM_ATOL = 1e-9


class SpecParseError(ValueError):
    """Malformed or structurally invalid specification."""


class SpecInvariantError(ValueError):
    """Well-formed specification whose values violate channel invariants."""


@dataclass
class ChannelSpec:
    channel: MixedUnitaryChannel
    form: str
    label: str | None
    source: str
    sha256: str

    def describe(self) -> dict:
        out = {"source": self.source, "sha256": self.sha256, "form": self.form, "label": self.label}
        if self.form == "coset":
            out["expansion"] = "pi_{a,b} = p_[a] / n for every clock label b"
        return out


def _index(value, orders: CyclicOrders, what: str):
    if isinstance(value, int):
        value = [value]
    if not isinstance(value, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in value):
        raise SpecParseError(f"{what} must be a list of integers, got {value!r}")
    try:
        return orders.validate(value)
    except ValueError as exc:
        raise SpecParseError(str(exc)) from exc


def _number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecParseError(f"{what} must be a number, got {value!r}")
    return float(value)


def parse_channel_spec(data, source: str = "<memory>", digest: str = "") -> ChannelSpec:
    if not isinstance(data, dict):
        raise SpecParseError("specification must be a JSON object")
    if "orders" not in data or "weights" not in data:
        raise SpecParseError("specification needs 'orders' and 'weights'")
    raw_orders = data["orders"]
    if not isinstance(raw_orders, list) or not raw_orders or not all(
        isinstance(p, int) and not isinstance(p, bool) for p in raw_orders
    ):
        raise SpecParseError(f"'orders' must be a non-empty list of integers, got {raw_orders!r}")
    try:
        orders = CyclicOrders(raw_orders)
    except DimensionLimitError:
        raise
    except ValueError as exc:
        raise SpecInvariantError(str(exc)) from exc

    weights = data["weights"]
    if not isinstance(weights, dict) or len(weights) != 1 or next(iter(weights)) not in ("full", "coset"):
        raise SpecParseError("'weights' must be an object with exactly one key, 'full' or 'coset'")
    form, records = next(iter(weights.items()))
    if not isinstance(records, list):
        raise SpecParseError(f"'weights.{form}' must be a list of records")

    n = orders.n
    table = np.zeros((n, n))
    for i, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise SpecParseError(f"record {i} is not an object")
        a = orders.linear(_index(rec.get("a"), orders, f"record {i} 'a'"))
        if form == "full":
            b = orders.linear(_index(rec.get("b"), orders, f"record {i} 'b'"))
            table[a, b] += _number(rec.get("w"), f"record {i} 'w'")
        else:
            table[a, :] += _number(rec.get("p"), f"record {i} 'p'") / n
    if np.any(table < 0):
        raise SpecInvariantError("weights must be nonnegative")
    total = table.sum()
    if abs(total - 1.0) > SPEC_SUM_ATOL:
        raise SpecInvariantError(f"weights sum to {float(total)!r}, not 1 (tolerance {SPEC_SUM_ATOL:g})")
    channel = MixedUnitaryChannel(orders, table / total)
    label = data.get("label")
    return ChannelSpec(channel, form, None if label is None else str(label), source, digest)


def load_channel_spec(path) -> ChannelSpec:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SpecParseError(f"{path}: invalid JSON ({exc})") from exc
    return parse_channel_spec(data, str(path), hashlib.sha256(raw).hexdigest())


def channel_to_spec(channel: MixedUnitaryChannel, label: str | None = None) -> dict:
    """Full-form specification dictionary for ``channel``."""
    records = [{"a": list(lab.a), "b": list(lab.b), "w": w} for lab, w in channel.support()]
    out = {"orders": list(channel.orders.orders), "weights": {"full": records}}
    if label is not None:
        out["label"] = label
    return out

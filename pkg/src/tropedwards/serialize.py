"""Exact JSON encoding: every rational becomes a ``[num, den]`` pair."""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Any


def rat(x) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def unrat(pair) -> Fraction:
    if isinstance(pair, list):
        return Fraction(pair[0], pair[1])
    return Fraction(pair)


def to_jsonable(obj: Any) -> Any:
    from .series import PuiseuxSeries, Valuation

    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rat(obj)
    if isinstance(obj, PuiseuxSeries):
        return obj.to_json()
    if isinstance(obj, Valuation):
        return {"kind": "Known" if obj.known else "AtLeast", "value": rat(obj.value)}
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"

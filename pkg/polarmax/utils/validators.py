"""Input validation helpers."""
from typing import Any, List, Optional

from polarmax.services.errors import ValidationError


def required_keys(data: dict, keys: List[str]) -> Optional[str]:
    """Return None if all keys present and non-empty (or 0); else error message."""
    if not data:
        return "Config is required"
    missing = [k for k in keys if data.get(k) is None or (data.get(k) == "" and data.get(k) != 0)]
    if missing:
        return f"Missing required fields: {', '.join('--' + k.replace('_', '-') for k in missing)}"
    return None


def one_of(value: Any, allowed: tuple) -> bool:
    return value in allowed


def int_or_none(v: Any) -> Optional[int]:
    if v is None:
        return None
    try:
        return int(v)
    except (TypeError, ValueError):
        return None


def positive_int(v: Any, name: str) -> int:
    n = int_or_none(v)
    if n is None or n < 1:
        raise ValidationError(f"{name} must be a positive integer, got {v!r}")
    return n


def parse_int_list(text: Any, name: str = "ns") -> List[int]:
    """'16,32,64' or [16, 32, 64]."""
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    out = []
    for item in items:
        n = int_or_none(str(item).strip())
        if n is None:
            raise ValidationError(f"{name}: {item!r} is not an integer")
        out.append(n)
    if not out:
        raise ValidationError(f"{name} is empty")
    return out


def parse_float_list(text: Any, name: str = "values") -> List[float]:
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        out = [float(str(v).strip()) for v in items]
    except ValueError:
        raise ValidationError(f"{name}: expected comma-separated numbers, got {text!r}")
    if not out:
        raise ValidationError(f"{name} is empty")
    return out


def parse_range(text: Any, name: str = "n-range") -> List[int]:
    """'3:100' -> [3, ..., 100] (inclusive)."""
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ValidationError(f"{name} must look like lo:hi, got {text!r}")
    lo, hi = int_or_none(parts[0]), int_or_none(parts[1])
    if lo is None or hi is None or lo > hi:
        raise ValidationError(f"{name} must look like lo:hi with lo <= hi, got {text!r}")
    return list(range(lo, hi + 1))

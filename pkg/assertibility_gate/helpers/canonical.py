"""
Canonical JSON form and SHA-256 digests for every hashed artifact.

Keys are sorted, separators carry no whitespace, text is UTF-8 and non-finite
numbers are refused. Rationals are written as "p/q" strings and timestamps as
UTC "YYYY-MM-DDTHH:MM:SSZ", so equal values always produce equal bytes.
"""
import hashlib
import json
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any

from .utilities import format_rational, format_timestamp


def _encode(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, datetime):
        return format_timestamp(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"{type(obj).__name__} is not canonically serializable")


def canonical_dumps(obj: Any) -> str:
    """Return canonical JSON string with sorted keys and no whitespace."""
    return json.dumps(
        obj,
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
        default=_encode,
    )


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def canonical_hash(obj: Any) -> str:
    """Return SHA-256 hex digest of the canonical JSON bytes of ``obj``."""
    return sha256_hex(canonical_bytes(obj))


def without_key(document: dict, key: str) -> dict:
    """Shallow copy of a mapping minus one key, used for self-digesting files."""
    return {k: v for k, v in document.items() if k != key}

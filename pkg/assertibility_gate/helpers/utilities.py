import json
import math
import re
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Union

from .errors import ParseError
from .logger import setup_logger

logger = setup_logger(name=__name__)

_RATIONAL_RE = re.compile(
    r"""
    \s*
    (?:
        (?P<num>[-+]?\d+)\s*/\s*(?P<den>\d+)                          # p/q
      |
        (?P<dec>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)            # decimal
    )
    \s*
    """,
    re.VERBOSE,
)

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def parse_rational(value: Any) -> Fraction:
    """
    Parse an exact rational.

    :param value: (int, Fraction, str or float) "p/q" or decimal strings are parsed exactly. Floats go
        through their shortest repr, so 0.7 becomes 7/10.
    :return: (Fraction) in lowest terms
    """
    if isinstance(value, bool):
        raise ParseError(f"Boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParseError(f"Non-finite number is not a rational: {value!r}")
        value = repr(value)
    if not isinstance(value, str):
        raise ParseError(f"Cannot parse a rational from {type(value).__name__}: {value!r}")
    match = _RATIONAL_RE.fullmatch(value)
    if not match:
        raise ParseError(f"Malformed rational: {value!r}")
    if match.group("num") is not None:
        den = int(match.group("den"))
        if den == 0:
            raise ParseError(f"Zero denominator: {value!r}")
        return Fraction(int(match.group("num")), den)
    return Fraction(match.group("dec"))


def format_rational(value: Fraction) -> str:
    """Canonical text form, always "p/q"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_timestamp(value: Union[str, datetime]) -> datetime:
    """
    Parse an ISO-8601 timestamp into an aware UTC datetime.

    Naive values are taken to be UTC.
    """
    if isinstance(value, datetime):
        parsed = value
    elif isinstance(value, str):
        text = value.strip()
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        try:
            parsed = datetime.fromisoformat(text)
        except ValueError as e:
            raise ParseError(f"Malformed timestamp {value!r}: {e}")
    else:
        raise ParseError(f"Cannot parse a timestamp from {type(value).__name__}: {value!r}")
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def format_timestamp(value: datetime) -> str:
    return parse_timestamp(value).strftime(TIMESTAMP_FORMAT)


def loads_exact(text: Union[str, bytes]) -> Any:
    """json.loads with fractional numbers parsed as exact Fractions."""
    try:
        return json.loads(text, parse_float=Fraction)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"Malformed JSON: {e}")


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    logger.debug(f"Reading {path}")
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}")
    return loads_exact(raw)


def read_jsonl(path: Union[str, Path]) -> List[Any]:
    """Read a JSON-lines file, skipping blank lines."""
    path = Path(path)
    logger.debug(f"Reading {path}")
    try:
        lines = path.read_bytes().splitlines()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}")
    return [loads_exact(line) for line in lines if line.strip()]


def write_text(
    path: Union[str, Path],
    text: str,
) -> Path:
    """Write UTF-8 text with a trailing newline, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not text.endswith("\n"):
        text += "\n"
    path.write_bytes(text.encode("utf-8"))
    logger.debug(f"Wrote {path}")

    return path

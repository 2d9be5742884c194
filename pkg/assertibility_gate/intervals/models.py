from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Tuple

from ..helpers.errors import InconsistentHistory, InvalidInterval, ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_rational, parse_rational

logger = setup_logger(name=__name__)

Rational = Fraction


@dataclass(frozen=True)
class Interval(object):
    """
    Closed interval [lo, hi] with exact rational endpoints.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo = parse_rational(self.lo)
        hi = parse_rational(self.hi)
        if lo > hi:
            raise InvalidInterval(f"Interval lower end {lo} exceeds upper end {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value: Any) -> "Interval":
        value = parse_rational(value)
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: Any) -> bool:
        return self.lo <= parse_rational(value) <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise InconsistentHistory(f"Intervals {self} and {other} are disjoint")
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def to_dict(self) -> dict:
        return {
            "lo": format_rational(self.lo),
            "hi": format_rational(self.hi),
        }

    @classmethod
    def from_dict(cls, document: Any) -> "Interval":
        if isinstance(document, dict):
            try:
                return cls(document["lo"], document["hi"])
            except KeyError as e:
                raise ParseError(f"Interval is missing {e}")
        if isinstance(document, (list, tuple)) and len(document) == 2:
            return cls(document[0], document[1])
        raise ParseError(f"Cannot read an interval from {document!r}")

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def make_interval(lo: Any, hi: Any) -> Interval:
    """
    Build an interval, refusing reversed endpoints.

    :param lo: (Rational) Lower end
    :param hi: (Rational) Upper end
    :return: (Interval)
    """
    return Interval(lo, hi)


def contains(interval: Interval, value: Any) -> bool:
    return interval.contains(value)


@dataclass(frozen=True)
class IntervalSequence(object):
    """
    Stage-indexed bound history. Instances built by ``monotonize`` are nested.
    """

    stages: Tuple[Interval, ...] = ()

    def __len__(self) -> int:
        return len(self.stages)

    def __getitem__(self, n: int) -> Interval:
        return self.stages[n]

    def __iter__(self):
        return iter(self.stages)

    @property
    def latest(self) -> Interval:
        if not self.stages:
            raise IndexError("Empty interval history")
        return self.stages[-1]

    def is_nested(self) -> bool:
        return all(b.subset_of(a) for a, b in zip(self.stages, self.stages[1:]))

    def extend(self, raw: Interval) -> "IntervalSequence":
        """Append one raw stage, tightening it against the history so far."""
        if not self.stages:
            return IntervalSequence((raw,))
        previous = self.stages[-1]
        lo = max(previous.lo, raw.lo)
        hi = min(previous.hi, raw.hi)
        if lo > hi:
            logger.error(f"Stage {len(self.stages)} bounds {raw} are disjoint from history {previous}")
            raise InconsistentHistory(
                f"Monotonized lower end {lo} exceeds upper end {hi} at stage {len(self.stages)}",
                stage=len(self.stages),
            )
        return IntervalSequence(self.stages + (Interval(lo, hi),))

    def to_list(self) -> List[dict]:
        return [stage.to_dict() for stage in self.stages]


def monotonize(raw: Iterable[Interval]) -> IntervalSequence:
    """
    Prefix max of lower ends and prefix min of upper ends over a raw history.

    :param raw: (list) Raw per-stage intervals
    :return: (IntervalSequence) Nested history
    """
    history = IntervalSequence()
    for interval in raw:
        history = history.extend(interval)

    return history


def hull_of(intervals: Sequence[Interval]) -> Interval:
    """Smallest interval covering all given intervals."""
    if not intervals:
        raise InvalidInterval("Hull of an empty collection")
    return Interval(
        min(i.lo for i in intervals),
        max(i.hi for i in intervals),
    )

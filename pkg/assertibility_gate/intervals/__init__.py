from .models import Interval, IntervalSequence, Rational, contains, hull_of, make_interval, monotonize

__all__ = [
    "Interval",
    "IntervalSequence",
    "Rational",
    "contains",
    "hull_of",
    "make_interval",
    "monotonize",
]

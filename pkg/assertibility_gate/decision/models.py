from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, FrozenSet, Optional, Tuple, Union

from ..helpers.errors import IndexOutOfRange, ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_rational, parse_rational
from ..intervals import Interval
from ..network.propagation import EnclosureVector

logger = setup_logger(name=__name__)


class Status(str, Enum):
    ASSERTED = "A"
    DENIED = "D"
    UNDETERMINED = "U"

    @property
    def is_categorical(self) -> bool:
        return self is not Status.UNDETERMINED


class ArgmaxMode(str, Enum):
    UNIQUE_ARGMAX = "unique_argmax"
    DENY_QUERY = "deny_query"
    TOP_K = "top_k"


def _check_index(index: int, output_arity: int, what: str):
    if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < output_arity:
        logger.error(f"{what} {index!r} is outside the {output_arity} network outputs")
        raise IndexOutOfRange(f"{what} {index!r} is outside the {output_arity} network outputs")


@dataclass(frozen=True)
class ThresholdPredicate(object):
    """s(x) >= tau on one network output."""

    output_index: int
    tau: Fraction

    kind = "threshold"

    def __post_init__(self):
        object.__setattr__(self, "tau", parse_rational(self.tau))

    def validate(self, output_arity: int):
        _check_index(self.output_index, output_arity, "output_index")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "output_index": self.output_index,
            "tau": format_rational(self.tau),
        }


@dataclass(frozen=True)
class ArgmaxPredicate(object):
    """
    Label claims over the output vector.

    unique_argmax: "i is the unique maximizer"; deny_query: "i is ruled out as the
    unique maximizer"; top_k: "the labels in K all beat every label outside K".
    """

    candidate_index: int
    mode: ArgmaxMode = ArgmaxMode.UNIQUE_ARGMAX
    top_k: Optional[FrozenSet[int]] = None

    kind = "argmax"

    def __post_init__(self):
        try:
            mode = ArgmaxMode(self.mode)
        except ValueError:
            raise ParseError(f"Unknown argmax mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if mode is ArgmaxMode.TOP_K:
            if not self.top_k:
                raise ParseError("top_k mode needs a nonempty label set")
            object.__setattr__(self, "top_k", frozenset(self.top_k))
        elif self.top_k is not None:
            raise ParseError(f"{mode.value} mode takes no label set")

    def validate(self, output_arity: int):
        _check_index(self.candidate_index, output_arity, "candidate_index")
        if self.mode is ArgmaxMode.TOP_K:
            for index in self.top_k:
                _check_index(index, output_arity, "top_k label")
            if len(self.top_k) >= output_arity:
                raise IndexOutOfRange(f"top_k set {sorted(self.top_k)} is not a proper subset of the outputs")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "candidate_index": self.candidate_index,
            "mode": self.mode.value,
            "top_k": sorted(self.top_k) if self.top_k is not None else None,
        }


@dataclass(frozen=True)
class LinearSpecPredicate(object):
    """c.z + d <= 0 over the network outputs z."""

    coefficients: Tuple[Fraction, ...]
    offset: Fraction = Fraction(0)

    kind = "linear"

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(parse_rational(c) for c in self.coefficients))
        object.__setattr__(self, "offset", parse_rational(self.offset))

    def validate(self, output_arity: int):
        if len(self.coefficients) != output_arity:
            raise IndexOutOfRange(
                f"Linear spec has {len(self.coefficients)} coefficients for {output_arity} outputs"
            )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "coefficients": [format_rational(c) for c in self.coefficients],
            "offset": format_rational(self.offset),
        }


Predicate = Union[ThresholdPredicate, ArgmaxPredicate, LinearSpecPredicate]


def predicate_from_dict(document: dict, tau: Any = None) -> Predicate:
    """
    Read a predicate record. Threshold predicates take ``tau`` from the caller
    (the contract) when given, otherwise from the record.
    """
    if not isinstance(document, dict):
        raise ParseError(f"Predicate must be an object, got {document!r}")
    kind = document.get("kind", "threshold")
    if kind == ThresholdPredicate.kind:
        threshold = tau if tau is not None else document.get("tau")
        if threshold is None:
            raise ParseError("Threshold predicate has no tau")
        return ThresholdPredicate(int(document.get("output_index", 0)), threshold)
    if kind == ArgmaxPredicate.kind:
        top_k = document.get("top_k")
        return ArgmaxPredicate(
            candidate_index=int(document.get("candidate_index", 0)),
            mode=document.get("mode", ArgmaxMode.UNIQUE_ARGMAX.value),
            top_k=frozenset(top_k) if top_k is not None else None,
        )
    if kind == LinearSpecPredicate.kind:
        return LinearSpecPredicate(
            coefficients=document.get("coefficients", ()),
            offset=document.get("offset", 0),
        )
    raise ParseError(f"Unknown predicate kind {kind!r}")


class WitnessKind(str, Enum):
    BOUND = "bound"
    SEPARATION = "separation"
    LINEAR = "linear"


@dataclass(frozen=True)
class SeparationPair(object):
    """Records lower_i > upper_j, which forces z_i > z_j."""

    i: int
    j: int
    lower_i: Fraction
    upper_j: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lower_i", parse_rational(self.lower_i))
        object.__setattr__(self, "upper_j", parse_rational(self.upper_j))

    @property
    def separates(self) -> bool:
        return self.i != self.j and self.lower_i > self.upper_j

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "lower_i": format_rational(self.lower_i),
            "upper_j": format_rational(self.upper_j),
        }


@dataclass(frozen=True)
class ForcingWitness(object):
    """
    Finite, checkable record of the inequalities behind a categorical status.

    bound: ``interval`` of output ``output_index``; separation: ``pairs`` over
    ``classes`` outputs; linear: the output ``enclosure`` the spec bounds are
    recomputed from.
    """

    kind: WitnessKind
    stage: int
    interval: Optional[Interval] = None
    output_index: Optional[int] = None
    pairs: Tuple[SeparationPair, ...] = ()
    classes: Optional[int] = None
    enclosure: Optional[EnclosureVector] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", WitnessKind(self.kind))
        except ValueError:
            raise ParseError(f"Unknown witness kind {self.kind!r}")
        object.__setattr__(self, "pairs", tuple(self.pairs))

    @classmethod
    def bound(cls, interval: Interval, stage: int, output_index: int = 0) -> "ForcingWitness":
        return cls(WitnessKind.BOUND, stage, interval=interval, output_index=output_index)

    @classmethod
    def separation(cls, pairs, stage: int, classes: int) -> "ForcingWitness":
        return cls(WitnessKind.SEPARATION, stage, pairs=tuple(pairs), classes=classes)

    @classmethod
    def linear(cls, enclosure: EnclosureVector, stage: int) -> "ForcingWitness":
        return cls(WitnessKind.LINEAR, stage, enclosure=enclosure)

    def to_dict(self) -> dict:
        document = {"kind": self.kind.value, "stage": self.stage}
        if self.kind is WitnessKind.BOUND:
            document["interval"] = self.interval.to_dict()
            document["output_index"] = self.output_index
        elif self.kind is WitnessKind.SEPARATION:
            document["pairs"] = [pair.to_dict() for pair in self.pairs]
            document["classes"] = self.classes
        else:
            document["enclosure"] = self.enclosure.to_dict()
        return document

    @classmethod
    def from_dict(cls, document: dict) -> "ForcingWitness":
        if not isinstance(document, dict):
            raise ParseError(f"Witness must be an object, got {document!r}")
        try:
            kind = WitnessKind(document.get("kind"))
            stage = document["stage"]
            if kind is WitnessKind.BOUND:
                return cls.bound(
                    Interval.from_dict(document["interval"]),
                    stage,
                    output_index=document.get("output_index", 0),
                )
            if kind is WitnessKind.SEPARATION:
                return cls.separation(
                    [SeparationPair(p["i"], p["j"], p["lower_i"], p["upper_j"]) for p in document["pairs"]],
                    stage,
                    classes=document["classes"],
                )
            return cls.linear(EnclosureVector.from_dict(document["enclosure"]), stage)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Malformed witness {document!r}: {e}")


@dataclass(frozen=True)
class DecideResult(object):
    status: Status
    witness: Optional[ForcingWitness]
    stages_used: int
    cost_spent: int
    exhausted: bool
    last_enclosure: Optional[EnclosureVector] = None
    last_bounds: Optional[Interval] = None

    def __iter__(self):
        # Unpacks as (status, witness, stages_used, cost_spent, exhausted).
        return iter((self.status, self.witness, self.stages_used, self.cost_spent, self.exhausted))

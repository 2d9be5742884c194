"""
Record-to-input bridge: transparent saturating counts per evidence class.
"""
from fractions import Fraction
from typing import AbstractSet, List, Sequence

from ..helpers.errors import UnknownClass
from ..helpers.logger import setup_logger
from ..intervals import Interval
from ..network.models import InputBox
from .models import DEFAULT_EVIDENCE_CLASSES, FeatureDim, FeatureSpec, RecordItem, UnverifiedHandling

logger = setup_logger(name=__name__)


def _check_classes(feature_spec: FeatureSpec, known_classes: AbstractSet[str]):
    for dim in feature_spec.dims:
        if dim.evidence_class not in known_classes:
            logger.error(f"Feature spec uses unknown evidence class {dim.evidence_class!r}")
            raise UnknownClass(f"Unknown evidence class {dim.evidence_class!r}")


def _saturated(count: int, dim: FeatureDim) -> Fraction:
    return Fraction(min(count, dim.saturation), dim.saturation)


def features_from_record(
    items: Sequence[RecordItem],
    feature_spec: FeatureSpec,
    known_classes: AbstractSet[str] = DEFAULT_EVIDENCE_CLASSES,
) -> List[Fraction]:
    """
    Point input: min(count of class, saturation) / saturation per dimension.

    :param items: (list) As-of record slice
    :param feature_spec: (FeatureSpec)
    :param known_classes: (set) Evidence-class vocabulary
    :return: (list) Fractions in [0, 1]
    """
    _check_classes(feature_spec, known_classes)
    return [
        _saturated(sum(1 for item in items if item.evidence_class == dim.evidence_class), dim)
        for dim in feature_spec.dims
    ]


def box_from_record(
    items: Sequence[RecordItem],
    feature_spec: FeatureSpec,
    radius: Fraction = Fraction(0),
    known_classes: AbstractSet[str] = DEFAULT_EVIDENCE_CLASSES,
) -> InputBox:
    """
    Input box for the record slice.

    Dimensions marked ``unverified="widen"`` run from the authenticated-only value to
    the all-items value; every dimension is then widened by ``radius``.
    """
    upper = features_from_record(items, feature_spec, known_classes)
    dims = []
    for dim, hi in zip(feature_spec.dims, upper):
        lo = hi
        if dim.unverified is UnverifiedHandling.WIDEN:
            lo = _saturated(
                sum(1 for item in items if item.evidence_class == dim.evidence_class and item.authenticated),
                dim,
            )
        dims.append(Interval(lo, hi))
    box = InputBox(tuple(dims)).widened(Fraction(radius))
    logger.debug(f"Input box {[str(d) for d in box.dims]}")

    return box

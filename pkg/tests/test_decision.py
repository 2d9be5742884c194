import random
from fractions import Fraction

import numpy as np
import pytest

from assertibility_gate.decision import (
    ArgmaxMode,
    ArgmaxPredicate,
    ForcingWitness,
    LinearSpecPredicate,
    SeparationPair,
    Status,
    ThresholdPredicate,
    argmax_status_at_stage,
    budgeted_decide,
    forced_status,
    linear_status_at_stage,
    predicate_from_dict,
    threshold_status_at_stage,
    witness_check,
)
from assertibility_gate.helpers.errors import ArityMismatch, IndexOutOfRange, ParseError
from assertibility_gate.intervals import Interval
from assertibility_gate.network import EnclosureVector, InputBox, Layer, NetworkModel

from .factories import grid_points, identity_network, numpy_forward, random_box, random_relu_network, relu_network

TAU = Fraction(7, 10)


def _enclosure(*pairs) -> EnclosureVector:
    return EnclosureVector(tuple(Interval(lo, hi) for lo, hi in pairs))


@pytest.mark.parametrize(
    "lo, hi, expected",
    [
        ("0.42", "0.81", Status.UNDETERMINED),
        ("0.76", "0.84", Status.ASSERTED),
        ("0.12", "0.29", Status.DENIED),
        ("0.6", "0.7", Status.UNDETERMINED),
        ("0.7", "0.7", Status.ASSERTED),
    ],
)
def test_threshold_boundary_convention(lo, hi, expected):
    assert threshold_status_at_stage(Interval(lo, hi), TAU) is expected


@pytest.mark.parametrize(
    "bounds, predicate, expected",
    [
        ([(2, 3), (0, 1)], ArgmaxPredicate(0), Status.ASSERTED),
        ([(0, 2), (1, 3)], ArgmaxPredicate(0), Status.UNDETERMINED),
        ([(0, 1), (2, 3)], ArgmaxPredicate(0), Status.DENIED),
        ([(5, 6), (4, "4.5"), (0, 1)], ArgmaxPredicate(0, ArgmaxMode.TOP_K, frozenset({0, 1})), Status.ASSERTED),
        ([(5, 6), (0, 7), (0, 1)], ArgmaxPredicate(0, ArgmaxMode.TOP_K, frozenset({0, 1})), Status.UNDETERMINED),
        ([(0, 1), (2, 3)], ArgmaxPredicate(0, ArgmaxMode.DENY_QUERY), Status.ASSERTED),
        ([(2, 3), (0, 1)], ArgmaxPredicate(0, ArgmaxMode.DENY_QUERY), Status.DENIED),
    ],
)
def test_argmax_status(bounds, predicate, expected):
    assert argmax_status_at_stage(_enclosure(*bounds), predicate) is expected


def test_argmax_index_checks():
    with pytest.raises(IndexOutOfRange):
        argmax_status_at_stage(_enclosure((0, 1), (2, 3)), ArgmaxPredicate(2))
    with pytest.raises(IndexOutOfRange):
        argmax_status_at_stage(_enclosure((0, 1), (2, 3)), ArgmaxPredicate(0, "top_k", frozenset({0, 1})))
    with pytest.raises(ParseError):
        ArgmaxPredicate(0, "top_k")


@pytest.mark.parametrize(
    "c, d, bounds, expected",
    [
        ((1, -1), 0, [(0, 1), (2, 3)], Status.ASSERTED),
        ((1, -1), 0, [(0, 2), (1, 3)], Status.UNDETERMINED),
        ((1, -1), 0, [(4, 5), (2, 3)], Status.DENIED),
        ((0, 0), 0, [(4, 5), (2, 3)], Status.ASSERTED),
    ],
)
def test_linear_status(c, d, bounds, expected):
    assert linear_status_at_stage(_enclosure(*bounds), LinearSpecPredicate(c, d)) is expected


def test_budgeted_decide_identity_asserts_at_stage_zero():
    box = InputBox((Interval("0.76", "0.84"),))
    result = budgeted_decide(identity_network(), box, ThresholdPredicate(0, TAU), budget=10, n_max=5)
    status, witness, stages, cost, exhausted = result
    assert (status, stages, cost, exhausted) == (Status.ASSERTED, 0, 1, False)
    assert witness.interval == Interval("0.76", "0.84")


def test_budgeted_decide_denies_above_relu_range():
    result = budgeted_decide(relu_network(), InputBox((Interval(-1, 1),)), ThresholdPredicate(0, 2), 10, 5)
    assert result.status is Status.DENIED
    assert result.witness.interval == Interval(0, 1)
    assert result.witness.stage == 0


def test_budgeted_decide_zero_budget():
    result = budgeted_decide(relu_network(), InputBox((Interval(-1, 1),)), ThresholdPredicate(0, "1/2"), 0, 5)
    assert tuple(result) == (Status.UNDETERMINED, None, 0, 0, True)
    assert result.last_enclosure is None


def test_budgeted_decide_stage_cap_versus_budget():
    box = InputBox((Interval(0, 1),))
    predicate = ThresholdPredicate(0, "1/2")
    capped = budgeted_decide(identity_network(), box, predicate, budget=100, n_max=3)
    assert tuple(capped) == (Status.UNDETERMINED, None, 3, 15, False)
    starved = budgeted_decide(identity_network(), box, predicate, budget=5, n_max=3)
    assert tuple(starved) == (Status.UNDETERMINED, None, 1, 3, True)
    assert starved.last_bounds == Interval(0, 1)


def test_budgeted_decide_arity():
    with pytest.raises(ArityMismatch):
        budgeted_decide(identity_network(), InputBox((Interval(0, 1), Interval(0, 1))), ThresholdPredicate(0, 1), 10, 2)


def test_witness_check_examples():
    predicate = ThresholdPredicate(0, TAU)
    assert witness_check(ForcingWitness.bound(Interval("0.76", "0.84"), 5), predicate, Status.ASSERTED)
    assert not witness_check(ForcingWitness.bound(Interval("0.42", "0.81"), 5), predicate, Status.ASSERTED)
    assert not witness_check(ForcingWitness.bound(Interval("0.76", "0.84"), 5), predicate, Status.UNDETERMINED)
    assert not witness_check(ForcingWitness.bound(Interval("0.76", "0.84"), -1), predicate, Status.ASSERTED)
    assert not witness_check(ForcingWitness.bound(Interval("0.76", "0.84"), 5, 1), predicate, Status.ASSERTED)

    separation = ForcingWitness.separation([SeparationPair(0, 1, 2, 1)], stage=0, classes=2)
    assert witness_check(separation, ArgmaxPredicate(0), Status.ASSERTED)
    assert not witness_check(separation, ArgmaxPredicate(1), Status.ASSERTED)
    out_of_range = ForcingWitness.separation([SeparationPair(0, 5, 2, 1)], stage=0, classes=2)
    assert not witness_check(out_of_range, ArgmaxPredicate(0), Status.ASSERTED)


def test_witness_perturbed_across_boundary_is_rejected():
    network = relu_network()
    for lo, hi in [("0.75", "0.9"), ("0.1", "0.3"), ("-1", "0.68")]:
        result = budgeted_decide(network, InputBox((Interval(lo, hi),)), ThresholdPredicate(0, TAU), 100, 5)
        assert result.status.is_categorical
        predicate = ThresholdPredicate(0, TAU)
        assert witness_check(result.witness, predicate, result.status)
        assert forced_status(result.witness, predicate) is result.status
        interval = result.witness.interval
        if result.status is Status.ASSERTED:
            moved = Interval(TAU - Fraction(1, 1000), interval.hi)
        else:
            moved = Interval(interval.lo, TAU)
        perturbed = ForcingWitness.bound(moved, result.witness.stage)
        assert not witness_check(perturbed, predicate, result.status)


def test_predicate_from_dict_takes_tau_from_caller():
    predicate = predicate_from_dict({"kind": "threshold", "output_index": 0, "tau": "1/2"}, tau="7/10")
    assert predicate == ThresholdPredicate(0, TAU)
    linear = predicate_from_dict({"kind": "linear", "coefficients": ["1", "-1"], "offset": "1/4"})
    assert linear == LinearSpecPredicate((1, -1), Fraction(1, 4))
    with pytest.raises(ParseError):
        predicate_from_dict({"kind": "threshold"})
    with pytest.raises(ParseError):
        predicate_from_dict({"kind": "sorted"})


def test_witness_dict_form_is_stable():
    witness = ForcingWitness.separation([SeparationPair(1, 0, "3/2", "1/3")], stage=2, classes=3)
    assert ForcingWitness.from_dict(witness.to_dict()) == witness
    with pytest.raises(ParseError):
        ForcingWitness.from_dict({"kind": "bound", "stage": 0})


def test_argmax_forcing_agrees_with_grid():
    rng = random.Random(31337)
    decided = 0
    index = 0
    while decided < 100 and index < 2_000:
        index += 1
        network = random_relu_network(rng, f"argmax-{index}", outputs=3)
        box = random_box(rng, network.input_arity)
        candidate = rng.randrange(3)
        for mode in (ArgmaxMode.UNIQUE_ARGMAX, ArgmaxMode.DENY_QUERY):
            predicate = ArgmaxPredicate(candidate, mode)
            result = budgeted_decide(network, box, predicate, budget=15, n_max=3)
            if not result.status.is_categorical:
                continue
            decided += 1
            assert witness_check(result.witness, predicate, result.status)
            outputs = numpy_forward(network, grid_points(box, 65))
            others = np.delete(outputs, candidate, axis=1).max(axis=1)
            strict_max = outputs[:, candidate] > others
            candidate_wins = (mode is ArgmaxMode.UNIQUE_ARGMAX) == (result.status is Status.ASSERTED)
            if candidate_wins:
                assert strict_max.all()
            else:
                assert not strict_max.any()
    assert decided >= 100


def test_linear_witness_closure():
    network = NetworkModel.build("pair", 1, [Layer.affine([[1], [-1]], [0, 3])])
    predicate = LinearSpecPredicate((1, -1), 0)
    result = budgeted_decide(network, InputBox((Interval(0, 1),)), predicate, 10, 3)
    assert result.status is Status.ASSERTED
    assert witness_check(result.witness, predicate, Status.ASSERTED)
    assert not witness_check(result.witness, predicate, Status.DENIED)

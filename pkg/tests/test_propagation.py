import random
from fractions import Fraction

import gmpy2
import numpy as np
import pytest

from assertibility_gate.helpers.errors import ArityMismatch, DimensionMismatch
from assertibility_gate.intervals import Interval
from assertibility_gate.network import (
    EnclosureVector,
    InputBox,
    Layer,
    NetworkModel,
    bound_linear_spec,
    evaluate_point,
    initial_state,
    monotone_enclosure,
    propagate_affine,
    propagate_box,
    propagate_monotone,
    propagate_relu,
    refine,
    split_dimension,
)

from .factories import (
    grid_points,
    identity_network,
    numpy_forward,
    per_dim_for,
    random_box,
    random_monotone_network,
    random_relu_network,
    relu_network,
)


def _box(*pairs) -> InputBox:
    return InputBox(tuple(Interval(lo, hi) for lo, hi in pairs))


def _enclosure(*pairs) -> EnclosureVector:
    return EnclosureVector(tuple(Interval(lo, hi) for lo, hi in pairs))


@pytest.mark.parametrize(
    "given, expected",
    [((-1, 2), (0, 2)), ((1, 3), (1, 3)), ((-3, -1), (0, 0))],
)
def test_relu_rule_table(given, expected):
    assert propagate_relu(_enclosure(given)) == _enclosure(expected)


@pytest.mark.parametrize(
    "weights, bias, given, expected",
    [
        ([[2]], [-1], [(0, 1)], [(-1, 1)]),
        ([[1, -1]], [0], [(0, 1), (0, 1)], [(-1, 1)]),
        ([[1]], [0], [("0.3", "0.3")], [("0.3", "0.3")]),
    ],
)
def test_affine_examples(weights, bias, given, expected):
    assert propagate_affine(Layer.affine(weights, bias), _enclosure(*given)) == _enclosure(*expected)


def test_affine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        propagate_affine(Layer.affine([[1, 1]], [0]), _enclosure((0, 1)))


def test_monotone_at_zero():
    sigmoid = propagate_monotone(Layer.monotone("sigmoid", 32), _enclosure((0, 0)))
    tanh = propagate_monotone(Layer.monotone("tanh", 32), _enclosure((0, 0)))
    assert sigmoid[0].contains(Fraction(1, 2)) and sigmoid[0].width <= Fraction(2, 2**32)
    assert tanh[0].contains(0) and tanh[0].width <= Fraction(2, 2**32)


def test_sigmoid_enclosure_contains_grid_values():
    enclosure = monotone_enclosure("sigmoid", Interval(-1, 1), 32)
    with gmpy2.context(precision=128):
        for k in range(100):
            x = gmpy2.mpq(-1) + gmpy2.mpq(2 * k, 99)
            value = 1 / (1 + gmpy2.exp(-gmpy2.mpfr(x)))
            assert enclosure.lo <= Fraction(str(gmpy2.mpq(value))) <= enclosure.hi


def test_propagate_box_examples():
    assert propagate_box(identity_network(), _box(("0.42", "0.81"))) == _enclosure(("0.42", "0.81"))
    network = NetworkModel.build("split", 1, [Layer.affine([[1], [-1]], [0, 0]), Layer.relu()])
    assert propagate_box(network, _box((-1, 1))) == _enclosure((0, 1), (0, 1))
    with pytest.raises(ArityMismatch):
        propagate_box(network, _box((0, 1), (0, 1)))


def test_degenerate_box_matches_point_evaluation():
    network = NetworkModel.build(
        "two-layer",
        2,
        [Layer.affine([[1, -2], ["1/2", 3]], [0, -1]), Layer.relu(), Layer.affine([[1, 1]], ["1/4"])],
    )
    x = [Fraction(1, 3), Fraction(2, 5)]
    assert propagate_box(network, InputBox.from_point(x)) == evaluate_point(network, x)


@pytest.mark.parametrize(
    "c, d, z, upper",
    [
        ((1, -1), 0, [(0, 1), (2, 3)], -1),
        ((1, -1), 0, [(0, 2), (1, 3)], 1),
        ((0, 0), 0, [(5, 7), (-3, 9)], 0),
    ],
)
def test_bound_linear_spec_examples(c, d, z, upper):
    assert bound_linear_spec(c, Fraction(d), _enclosure(*z)) == upper


def test_bound_linear_spec_arity():
    with pytest.raises(ArityMismatch):
        bound_linear_spec((1,), Fraction(0), _enclosure((0, 1), (0, 1)))


def test_refine_splits_at_zero():
    network = relu_network()
    state = initial_state(network, _box((-1, 1)))
    assert state.bounds == _enclosure((0, 1))
    refined = refine(state, network, 10)
    assert refined.leaves == (_box((-1, 0)), _box((0, 1)))
    assert refined.bounds == _enclosure((0, 1))
    assert (refined.stage, refined.cost_spent) == (1, 3)


def test_degenerate_box_is_a_fixed_point():
    network = relu_network()
    state = initial_state(network, InputBox.from_point(["0.3"]))
    refined = refine(state, network, 10)
    assert refined.fixed_point and not refined.exhausted
    assert (refined.stage, refined.cost_spent) == (0, 1)


def test_zero_budget_is_exhausted():
    network = relu_network()
    state = initial_state(network, _box((-1, 1)))
    refined = refine(state, network, 0)
    assert refined.exhausted
    assert refined.leaves == state.leaves and refined.stage == 0


def test_stage_cost_doubles():
    network = identity_network()
    state = initial_state(network, _box((0, 1)))
    costs = [state.cost_spent]
    for _ in range(4):
        state = refine(state, network, 1000)
        costs.append(state.cost_spent)
    assert costs == [2 ** (n + 1) - 1 for n in range(5)]
    assert len(state.leaves) == 16


def test_split_dimension_skips_irrelevant_inputs():
    network = NetworkModel.build("ignores-x0", 3, [Layer.affine([[0, 1, 1]], [0])])
    assert split_dimension(network, _box((0, 8), (0, 1), (0, 1))) == 1
    assert split_dimension(network, _box((0, 8), (0, 0), (0, 0))) is None



def test_relu_containment_at_every_stage():
    rng = random.Random(4242)
    for index in range(100):
        network = random_relu_network(rng, f"random-{index}")
        box = random_box(rng, network.input_arity)
        outputs = numpy_forward(network, grid_points(box, per_dim_for(network.input_arity)))
        assert outputs.shape[0] >= 10_000
        lows = [Fraction(float(v)) for v in outputs.min(axis=0)]
        highs = [Fraction(float(v)) for v in outputs.max(axis=0)]

        state = initial_state(network, box)
        widths = [d.width for d in state.bounds]
        for _ in range(4):
            for j, bounds in enumerate(state.bounds):
                assert bounds.lo <= lows[j] and highs[j] <= bounds.hi
            state = refine(state, network, 1000)
            new_widths = [d.width for d in state.bounds]
            assert all(new <= old for new, old in zip(new_widths, widths))
            widths = new_widths


def test_monotone_containment_at_every_stage():
    rng = random.Random(777)
    # float64 oracle error; the enclosures themselves are outward-rounded
    slack = Fraction(1, 10**9)
    for index in range(100):
        network = random_monotone_network(rng, f"monotone-{index}")
        box = random_box(rng, network.input_arity)
        outputs = numpy_forward(network, grid_points(box, per_dim_for(network.input_arity)))
        assert outputs.shape[0] >= 10_000
        low, high = Fraction(float(outputs.min())), Fraction(float(outputs.max()))

        state = initial_state(network, box)
        width = state.bounds[0].width
        for _ in range(4):
            (bounds,) = state.bounds
            assert bounds.lo - slack <= low and high <= bounds.hi + slack
            state = refine(state, network, 1000)
            assert state.bounds[0].width <= width
            width = state.bounds[0].width


def test_linear_spec_upper_bound_over_approximates():
    rng = random.Random(99)
    for index in range(100):
        network = random_relu_network(rng, f"linear-{index}", outputs=2)
        box = random_box(rng, network.input_arity)
        c = (Fraction(rng.randint(-4, 4), 2), Fraction(rng.randint(-4, 4), 2))
        d = Fraction(rng.randint(-8, 8), 8)
        upper = bound_linear_spec(c, d, propagate_box(network, box))
        outputs = numpy_forward(network, grid_points(box, 65))
        values = outputs @ np.array([float(c[0]), float(c[1])]) + float(d)
        assert Fraction(float(values.max())) <= upper

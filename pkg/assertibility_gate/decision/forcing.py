"""
Forcing rules: when certified bounds entail a predicate, its negation, or neither.

Assertion is inclusive (lo >= tau) and denial strict (hi < tau); the boundary
hi == tau with lo < tau stays undetermined.
"""
from fractions import Fraction
from typing import List, Optional

from ..helpers.errors import GateError
from ..helpers.logger import setup_logger
from ..helpers.utilities import parse_rational
from ..intervals import Interval
from ..network.models import InputBox, NetworkModel
from ..network.propagation import (
    EnclosureVector,
    bound_linear_spec,
    initial_state,
    lower_linear_spec,
    refine,
)
from .models import (
    ArgmaxMode,
    ArgmaxPredicate,
    DecideResult,
    ForcingWitness,
    LinearSpecPredicate,
    Predicate,
    SeparationPair,
    Status,
    ThresholdPredicate,
    WitnessKind,
)

logger = setup_logger(name=__name__)


def threshold_status_at_stage(bounds: Interval, tau: Fraction) -> Status:
    tau = parse_rational(tau)
    if bounds.lo >= tau:
        return Status.ASSERTED
    if bounds.hi < tau:
        return Status.DENIED
    return Status.UNDETERMINED


def _beats(bounds: EnclosureVector, i: int, j: int) -> bool:
    return bounds[i].lo > bounds[j].hi


def _unique_argmax_status(bounds: EnclosureVector, i: int) -> Status:
    others = [j for j in range(len(bounds)) if j != i]
    if all(_beats(bounds, i, j) for j in others):
        return Status.ASSERTED
    if any(_beats(bounds, j, i) for j in others):
        return Status.DENIED
    return Status.UNDETERMINED


def argmax_status_at_stage(bounds: EnclosureVector, predicate: ArgmaxPredicate) -> Status:
    """
    :param bounds: (EnclosureVector) Certified output bounds
    :param predicate: (ArgmaxPredicate)
    :return: (Status)
    """
    predicate.validate(len(bounds))
    i = predicate.candidate_index
    if predicate.mode is ArgmaxMode.UNIQUE_ARGMAX:
        return _unique_argmax_status(bounds, i)
    if predicate.mode is ArgmaxMode.DENY_QUERY:
        status = _unique_argmax_status(bounds, i)
        if status is Status.ASSERTED:
            return Status.DENIED
        if status is Status.DENIED:
            return Status.ASSERTED
        return Status.UNDETERMINED
    outside = [j for j in range(len(bounds)) if j not in predicate.top_k]
    if all(_beats(bounds, a, b) for a in predicate.top_k for b in outside):
        return Status.ASSERTED
    return Status.UNDETERMINED


def linear_status_at_stage(bounds: EnclosureVector, predicate: LinearSpecPredicate) -> Status:
    if bound_linear_spec(predicate.coefficients, predicate.offset, bounds) <= 0:
        return Status.ASSERTED
    if lower_linear_spec(predicate.coefficients, predicate.offset, bounds) > 0:
        return Status.DENIED
    return Status.UNDETERMINED


def status_at_stage(bounds: EnclosureVector, predicate: Predicate) -> Status:
    if isinstance(predicate, ThresholdPredicate):
        predicate.validate(len(bounds))
        return threshold_status_at_stage(bounds[predicate.output_index], predicate.tau)
    if isinstance(predicate, ArgmaxPredicate):
        return argmax_status_at_stage(bounds, predicate)
    return linear_status_at_stage(bounds, predicate)


def _pair(bounds: EnclosureVector, i: int, j: int) -> SeparationPair:
    return SeparationPair(i, j, bounds[i].lo, bounds[j].hi)


def _separation_pairs(bounds: EnclosureVector, predicate: ArgmaxPredicate, status: Status) -> List[SeparationPair]:
    i = predicate.candidate_index
    others = [j for j in range(len(bounds)) if j != i]
    if predicate.mode is ArgmaxMode.TOP_K:
        outside = [j for j in range(len(bounds)) if j not in predicate.top_k]
        return [_pair(bounds, a, b) for a in sorted(predicate.top_k) for b in outside]
    i_wins = (predicate.mode is ArgmaxMode.UNIQUE_ARGMAX) == (status is Status.ASSERTED)
    if i_wins:
        return [_pair(bounds, i, j) for j in others]
    rival = next(j for j in others if _beats(bounds, j, i))
    return [_pair(bounds, rival, i)]


def make_witness(
    bounds: EnclosureVector,
    predicate: Predicate,
    status: Status,
    stage: int,
) -> ForcingWitness:
    """Package the bounds of a forcing stage as a witness for ``status``."""
    if isinstance(predicate, ThresholdPredicate):
        return ForcingWitness.bound(bounds[predicate.output_index], stage, predicate.output_index)
    if isinstance(predicate, ArgmaxPredicate):
        return ForcingWitness.separation(_separation_pairs(bounds, predicate, status), stage, len(bounds))
    return ForcingWitness.linear(bounds, stage)


def _threshold_bounds(bounds: Optional[EnclosureVector], predicate: Predicate) -> Optional[Interval]:
    if bounds is None or not isinstance(predicate, ThresholdPredicate):
        return None
    return bounds[predicate.output_index]


def budgeted_decide(
    network: NetworkModel,
    box: InputBox,
    predicate: Predicate,
    budget: int,
    n_max: int,
) -> DecideResult:
    """
    Refine until the predicate is forced, the stage cap is reached, or the budget runs out.

    :param network: (NetworkModel)
    :param box: (InputBox)
    :param predicate: (ThresholdPredicate, ArgmaxPredicate or LinearSpecPredicate)
    :param budget: (int) Leaf propagations allowed in total
    :param n_max: (int) Last stage that may be reached
    :return: (DecideResult) First forcing stage, or U with the exhausted flag
    """
    if budget < 0 or n_max < 0:
        raise GateError(f"budget and n_max must be >= 0, got {budget} and {n_max}")
    network.check_input_arity(box.arity)
    predicate.validate(network.output_arity)

    if budget < 1:
        logger.debug("Zero budget: stage 0 not affordable")
        return DecideResult(Status.UNDETERMINED, None, 0, 0, True)

    state = initial_state(network, box)
    while True:
        bounds = state.bounds
        status = status_at_stage(bounds, predicate)
        if status.is_categorical:
            witness = make_witness(bounds, predicate, status, state.stage)
            logger.debug(f"Forced {status.value} at stage {state.stage}, cost {state.cost_spent}")
            return DecideResult(
                status,
                witness,
                state.stage,
                state.cost_spent,
                False,
                bounds,
                _threshold_bounds(bounds, predicate),
            )
        if state.stage >= n_max:
            break
        next_state = refine(state, network, budget - state.cost_spent)
        if next_state.exhausted or next_state.fixed_point:
            state = next_state
            break
        state = next_state

    bounds = state.bounds
    return DecideResult(
        Status.UNDETERMINED,
        None,
        state.stage,
        state.cost_spent,
        state.exhausted,
        bounds,
        _threshold_bounds(bounds, predicate),
    )


def _pairs_forcing(witness: ForcingWitness) -> set:
    return {(p.i, p.j) for p in witness.pairs if p.separates}


def _separation_entails(witness: ForcingWitness, predicate: ArgmaxPredicate, claimed: Status) -> bool:
    classes = witness.classes
    if not isinstance(classes, int) or classes < 1:
        return False
    if any(not (0 <= p.i < classes and 0 <= p.j < classes) for p in witness.pairs):
        return False
    try:
        predicate.validate(classes)
    except GateError:
        return False
    forced = _pairs_forcing(witness)
    i = predicate.candidate_index
    others = [j for j in range(classes) if j != i]
    i_wins = all((i, j) in forced for j in others)
    i_loses = any((j, i) in forced for j in others)

    if predicate.mode is ArgmaxMode.UNIQUE_ARGMAX:
        return i_wins if claimed is Status.ASSERTED else claimed is Status.DENIED and i_loses
    if predicate.mode is ArgmaxMode.DENY_QUERY:
        return i_loses if claimed is Status.ASSERTED else claimed is Status.DENIED and i_wins
    outside = [j for j in range(classes) if j not in predicate.top_k]
    return claimed is Status.ASSERTED and all((a, b) in forced for a in predicate.top_k for b in outside)


def witness_check(
    witness: ForcingWitness,
    predicate: Predicate,
    claimed_status: Status,
) -> bool:
    """
    Re-verify that the witness's recorded inequalities entail the claimed status.

    Nothing about how the witness was produced is trusted; only its numbers.

    :param witness: (ForcingWitness)
    :param predicate: (Predicate)
    :param claimed_status: (Status) A or D; U is never entailed by a witness
    :return: (bool)
    """
    try:
        claimed_status = Status(claimed_status)
    except ValueError:
        return False
    if witness is None or not claimed_status.is_categorical:
        return False
    if not isinstance(witness.stage, int) or isinstance(witness.stage, bool) or witness.stage < 0:
        return False

    if isinstance(predicate, ThresholdPredicate):
        if witness.kind is not WitnessKind.BOUND or witness.output_index != predicate.output_index:
            return False
        return threshold_status_at_stage(witness.interval, predicate.tau) is claimed_status

    if isinstance(predicate, ArgmaxPredicate):
        if witness.kind is not WitnessKind.SEPARATION:
            return False
        return _separation_entails(witness, predicate, claimed_status)

    if witness.kind is not WitnessKind.LINEAR or witness.enclosure is None:
        return False
    if len(witness.enclosure) != len(predicate.coefficients):
        return False
    return linear_status_at_stage(witness.enclosure, predicate) is claimed_status


def forced_status(witness: ForcingWitness, predicate: Predicate) -> Status:
    """The status a witness forces for a predicate, U when it forces neither side."""
    for status in (Status.ASSERTED, Status.DENIED):
        if witness_check(witness, predicate, status):
            return status
    return Status.UNDETERMINED

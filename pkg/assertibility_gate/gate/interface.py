"""
The assertibility interface: scope, then standing, then witness search.

A categorical status leaves the gate only with a certificate that the gate's
own checker accepts; everything else is Undetermined with one reason class.
"""
from collections import Counter
from typing import Optional, Sequence, Union

from ..certificates.checker import CertificateChecker
from ..certificates.issuer import issue_certificate
from ..certificates.models import VERIFIER_VERSION, CertScope, Claim, DeploymentContract
from ..decision.forcing import budgeted_decide
from ..decision.models import DecideResult, Predicate, Status
from ..helpers.errors import ConfigurationError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_rational, format_timestamp
from ..intervals import Interval
from ..network.models import InputBox, NetworkModel
from ..records.features import box_from_record
from ..records.models import QueryMeta, ScopePolicy, ScopeResult, StandingPolicy, StandingResult
from ..records.policies import evaluate_scope, evaluate_standing
from ..records.store import RecordStore
from .models import InterfaceOutput, Query, ReasonClass, UndeterminedDetail

logger = setup_logger(name=__name__)


def classify_undetermined(
    scope_result: ScopeResult,
    standing_result: Optional[StandingResult],
    decide_result: Optional[DecideResult],
) -> ReasonClass:
    """
    Reason class of an Undetermined status.

    Precedence: U-SCOPE, then U-EVIDENCE, then U-COMPUTE when the budget ran out,
    else U-MODEL.
    """
    if not scope_result.passed:
        return ReasonClass.U_SCOPE
    if standing_result is not None and not standing_result.passed:
        return ReasonClass.U_EVIDENCE
    if decide_result is not None and decide_result.exhausted:
        return ReasonClass.U_COMPUTE
    return ReasonClass.U_MODEL


def _validate_pinning(
    contract: DeploymentContract,
    network: NetworkModel,
    scope_policy: ScopePolicy,
    standing_policy: StandingPolicy,
):
    problems = []
    if not contract.hash_is_valid:
        problems.append("contract_hash does not match the contract content")
    if network.model_hash != contract.t_int.model_hash:
        problems.append(f"network hash {network.model_hash[:12]} is not the pinned {contract.t_int.model_hash[:12]}")
    if contract.t_int.config_hash != contract.expected_config_hash:
        problems.append("t_int.config_hash does not match the regime and input radius")
    if contract.t_int.verifier_version != VERIFIER_VERSION:
        problems.append(f"verifier version {contract.t_int.verifier_version!r} is not {VERIFIER_VERSION!r}")
    if scope_policy.policy_id != contract.scope_policy_id:
        problems.append(f"scope policy {scope_policy.policy_id!r} is not {contract.scope_policy_id!r}")
    if standing_policy.policy_id != contract.standing_policy_id:
        problems.append(f"standing policy {standing_policy.policy_id!r} is not {contract.standing_policy_id!r}")
    needed = set(network.monotone_functions) | ({"relu"} if network.uses_relu else set())
    unsupported = sorted(needed - set(contract.regime.activations))
    if unsupported:
        problems.append(f"regime does not cover activations {unsupported}")
    if problems:
        for problem in problems:
            logger.error(f"Contract pinning: {problem}")
        raise ConfigurationError("; ".join(problems))


class AssertibilityGate(object):
    """
    Evaluates queries under one deployment contract.

    The network and policies must be the ones the contract pins; construction
    fails with ConfigurationError otherwise.
    """

    def __init__(
        self,
        contract: DeploymentContract,
        network: NetworkModel,
        record_store: RecordStore,
        scope_policy: ScopePolicy,
        standing_policy: StandingPolicy,
    ):
        """
        :param contract: (DeploymentContract) Sealed contract
        :param network: (NetworkModel) Network whose hash the contract pins
        :param record_store: (RecordStore) Public record, read as of contract.record_time
        :param scope_policy: (ScopePolicy) Policy named by contract.scope_policy_id
        :param standing_policy: (StandingPolicy) Policy named by contract.standing_policy_id
        """
        _validate_pinning(contract, network, scope_policy, standing_policy)
        self.contract = contract
        self.network = network
        self.record_store = record_store
        self.scope_policy = scope_policy
        self.standing_policy = standing_policy
        self.checker = CertificateChecker(contract, record_store, scope_policy, standing_policy)
        self.reason_counts = Counter()
        self.last_decide_result: Optional[DecideResult] = None

    def _undetermined(self, query_id: str, reason: ReasonClass, detail: UndeterminedDetail) -> InterfaceOutput:
        self.reason_counts[reason.value] += 1
        tally = ", ".join(f"{k}={v}" for k, v in sorted(self.reason_counts.items()))
        message = f"{query_id}: U ({reason.value}); reasons so far: {tally}"
        if reason is ReasonClass.U_COMPUTE:
            logger.warning(message)
        else:
            logger.info(message)
        return InterfaceOutput(
            query_id=query_id,
            status=Status.UNDETERMINED,
            contract_hash=self.contract.contract_hash,
            record_time=self.contract.record_time,
            reason=reason,
            detail=detail,
        )

    @staticmethod
    def _decide_detail(result: DecideResult, failed_checks: Sequence[str] = ()) -> UndeterminedDetail:
        return UndeterminedDetail(
            failed_checks=tuple(failed_checks),
            last_bounds=result.last_bounds,
            last_enclosure=result.last_enclosure,
            stages_used=result.stages_used,
            cost_spent=result.cost_spent,
            exhausted=result.exhausted,
        )

    def _search(
        self,
        query_id: str,
        query_meta: QueryMeta,
        predicate: Predicate,
        box: InputBox,
        scope_result: ScopeResult,
        standing_result: Optional[StandingResult],
        record_refs: Sequence[str],
    ) -> InterfaceOutput:
        result = budgeted_decide(self.network, box, predicate, self.contract.budget, self.contract.n_max)
        self.last_decide_result = result
        if not result.status.is_categorical:
            reason = classify_undetermined(scope_result, standing_result, result)
            failed = ("budget",) if result.exhausted else ()
            return self._undetermined(query_id, reason, self._decide_detail(result, failed))

        claim = Claim.for_predicate(predicate, query_id, result.status)
        scope = CertScope(
            jurisdiction=query_meta.jurisdiction,
            time_window=(query_meta.query_time, query_meta.query_time),
            identity_rule_id=query_meta.identity_rule_id,
        )
        token = issue_certificate(self.contract, claim, result.witness, record_refs, scope, self.record_store)
        check = self.checker.check(token)
        if not check.accepted:
            # Never speak categorically on a certificate the gate itself rejects.
            logger.warning(f"{query_id}: issued certificate failed its own check {check.to_dict()}")
            return self._undetermined(
                query_id,
                ReasonClass.U_EVIDENCE,
                self._decide_detail(result, [f.code.value for f in check.failures]),
            )

        logger.info(
            f"{query_id}: {result.status.value} at stage {result.stages_used}, "
            f"cost {result.cost_spent}, certificate {token.cert_hash[:12]}"
        )
        return InterfaceOutput(
            query_id=query_id,
            status=result.status,
            contract_hash=self.contract.contract_hash,
            record_time=self.contract.record_time,
            certificates=(token,),
        )

    def evaluate(self, query: Query) -> InterfaceOutput:
        """
        Run the full pipeline for a record-backed query.

        :param query: (Query)
        :return: (InterfaceOutput) A/D with a mixed certificate, or U with a reason class
        """
        self.last_decide_result = None
        scope_result = evaluate_scope(self.scope_policy, query.query_meta)
        if not scope_result.passed:
            return self._undetermined(
                query.query_id,
                classify_undetermined(scope_result, None, None),
                UndeterminedDetail(failed_checks=(f"scope.{scope_result.reason.value}",)),
            )

        items = self.record_store.record_asof(self.contract.record_time)
        standing_result = evaluate_standing(self.standing_policy, items)
        if not standing_result.passed:
            return self._undetermined(
                query.query_id,
                classify_undetermined(scope_result, standing_result, None),
                UndeterminedDetail(failed_checks=tuple(f"standing.{c}" for c in sorted(standing_result.missing))),
            )

        predicate = query.predicate_for(self.contract)
        box = box_from_record(items, query.feature_spec, self.contract.input_radius)
        return self._search(
            query.query_id,
            query.query_meta,
            predicate,
            box,
            scope_result,
            standing_result,
            [item.item_hash for item in items],
        )

    def evaluate_input(
        self,
        query_id: str,
        point_or_box: Union[InputBox, Sequence],
        predicate: Predicate,
        query_meta: QueryMeta,
    ) -> InterfaceOutput:
        """
        Scope check and witness search on an explicit input.

        Certificates issued here are formal: they rely on no record items.
        A point is widened by the contract's input radius.
        """
        self.last_decide_result = None
        scope_result = evaluate_scope(self.scope_policy, query_meta)
        if not scope_result.passed:
            return self._undetermined(
                query_id,
                classify_undetermined(scope_result, None, None),
                UndeterminedDetail(failed_checks=(f"scope.{scope_result.reason.value}",)),
            )
        if isinstance(point_or_box, InputBox):
            box = point_or_box
        else:
            box = InputBox.from_point(point_or_box).widened(self.contract.input_radius)
        return self._search(query_id, query_meta, predicate, box, scope_result, None, ())


def evaluate_interface(
    contract: DeploymentContract,
    network: NetworkModel,
    query: Query,
    record_store: RecordStore,
    scope_policy: ScopePolicy,
    standing_policy: StandingPolicy,
) -> InterfaceOutput:
    """One-shot evaluation; see ``AssertibilityGate.evaluate``."""
    return AssertibilityGate(contract, network, record_store, scope_policy, standing_policy).evaluate(query)


def _witness_summary(output: InterfaceOutput) -> str:
    token = output.certificates[0]
    witness = token.witness
    if witness.interval is not None:
        shown = f"bound {witness.interval}"
    elif witness.pairs:
        shown = "separation " + ", ".join(
            f"z{p.i} >= {format_rational(p.lower_i)} > {format_rational(p.upper_j)} >= z{p.j}" for p in witness.pairs
        )
    else:
        shown = f"enclosure {', '.join(str(d) for d in witness.enclosure)}"
    return f"certificate attached: {token.cert_hash[:16]}, {shown} at stage {witness.stage}"


def render_transcript(output: InterfaceOutput, contract: DeploymentContract, claim_text: str) -> str:
    """
    Surface text for a verdict. Only ever written next to the structured verdict.

    :param output: (InterfaceOutput)
    :param contract: (DeploymentContract) Supplies the standard and threshold named in the text
    :param claim_text: (str) The world-claim the warrant-claim is about
    :return: (str) One paragraph, newline-terminated
    """
    preamble = (
        f"As of {format_timestamp(output.record_time)}, under evidential standard "
        f"{contract.standing_policy_id} and threshold {format_rational(contract.tau)}"
    )
    if output.status is Status.ASSERTED:
        return f"{preamble}, it is licensed to assert '{claim_text}' ({_witness_summary(output)}).\n"
    if output.status is Status.DENIED:
        return f"{preamble}, it is licensed to deny '{claim_text}' ({_witness_summary(output)}).\n"

    detail = output.detail or UndeterminedDetail()
    parts = [f"stages {detail.stages_used}", f"cost {detail.cost_spent}"]
    if detail.last_bounds is not None:
        parts.insert(0, f"certified bounds {detail.last_bounds}")
    if detail.failed_checks:
        parts.append(f"failed checks {', '.join(detail.failed_checks)}")
    if detail.exhausted:
        parts.append("budget exhausted")
    text = (
        f"{preamble}, neither asserting nor denying '{claim_text}' is licensed. "
        f"Status: Undetermined ({output.reason.value}; {'; '.join(parts)})."
    )
    if output.supersedes is not None:
        text += f" Supersedes verdict {output.supersedes[:16]}."
    return text + "\n"


def threshold_bounds(output: InterfaceOutput) -> Optional[Interval]:
    """Bounds shown for a verdict: the witness interval when forced, else the last certified bounds."""
    if output.status.is_categorical:
        return output.certificates[0].witness.interval
    return output.detail.last_bounds if output.detail is not None else None


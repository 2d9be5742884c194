import copy
from dataclasses import replace
from fractions import Fraction

import pytest

from assertibility_gate.certificates import (
    CertificateToken,
    CertScope,
    CertType,
    Claim,
    FailureCode,
    Forcing,
    check_certificate,
    forces,
    issue_certificate,
    issue_record_certificate,
    load_certificate,
    load_contract,
    save_certificate,
    save_contract,
)
from assertibility_gate.decision import ForcingWitness, Status, ThresholdPredicate
from assertibility_gate.helpers import canonical_dumps, canonical_hash, without_key
from assertibility_gate.helpers.errors import (
    ConfigurationError,
    HashMismatch,
    UnresolvedRecordRef,
    WitnessRejected,
)
from assertibility_gate.intervals import Interval


def _resealed(document: dict) -> dict:
    document["cert_hash"] = canonical_hash(without_key(document, "cert_hash"))
    return document


def _codes(result) -> set:
    return set(result.codes)


def test_stage2_certificate_is_accepted(checker, stage2_token):
    assert stage2_token.cert_type is CertType.MIXED
    assert stage2_token.witness.interval == Interval("19/25", "21/25")
    assert stage2_token.witness.stage == 5
    assert len(stage2_token.provenance.record_item_hashes) == 4
    result = checker.check(stage2_token)
    assert result.accepted and result.failures == ()


def test_contract_hash_is_content_determined(stage2_contract):
    assert stage2_contract.hash_is_valid
    assert stage2_contract.revised(tau="0.7000").contract_hash == stage2_contract.contract_hash
    assert stage2_contract.revised(tau=Fraction(7, 10)).contract_hash == stage2_contract.contract_hash
    assert stage2_contract.revised(budget=10).contract_hash != stage2_contract.revised(budget=11).contract_hash
    assert stage2_contract.at_record_time("2025-03-01T00:00:00Z").contract_hash != stage2_contract.contract_hash


def test_stale_contract_file_is_refused(tmp_path, stage2_contract):
    document = stage2_contract.to_dict()
    document["budget"] = 99
    (tmp_path / "stale.contract.json").write_text(canonical_dumps(document))
    with pytest.raises(HashMismatch):
        load_contract(tmp_path / "stale.contract.json")
    unverified = load_contract(tmp_path / "stale.contract.json", verify=False)
    assert not unverified.hash_is_valid

    blanked = stage2_contract.to_dict()
    blanked["contract_hash"] = ""
    (tmp_path / "blank.contract.json").write_text(canonical_dumps(blanked))
    with pytest.raises(HashMismatch):
        load_contract(tmp_path / "blank.contract.json")

    path = save_contract(stage2_contract, tmp_path / "fresh.contract.json")
    assert load_contract(path) == stage2_contract


def test_contract_rejects_negative_budget(stage2_contract):
    with pytest.raises(ConfigurationError):
        stage2_contract.revised(budget=-1)


def test_missing_field_stops_the_check(checker, stage2_token):
    document = stage2_token.to_dict()
    del document["witness"]
    result = checker.check(document)
    assert not result.accepted
    assert [f.to_dict() for f in result.failures] == [{"field": "witness", "code": "FIELD_MISSING"}]

    document = stage2_token.to_dict()
    del document["provenance"]["replay_seed"]
    assert _codes(checker.check(document)) == {FailureCode.FIELD_MISSING}


def test_altered_hash_is_detected(checker, stage2_token):
    document = stage2_token.to_dict()
    document["cert_hash"] = "0" * 64
    assert _codes(checker.check(document)) == {FailureCode.HASH_MISMATCH}

    document = stage2_token.to_dict()
    document["witness"]["stage"] = 4
    assert FailureCode.HASH_MISMATCH in _codes(checker.check(document))


def _leaked_ref(record_store):
    return record_store.get("leaked-documents").item_hash


def _inquiry_ref(record_store):
    return record_store.get("committee-inquiry-report").item_hash


TAMPERING = [
    ("witness lowered", lambda d, s: d["witness"]["interval"].update(lo="17/25"), FailureCode.WITNESS_INVALID),
    ("stage past cap", lambda d, s: d["witness"].update(stage=6), FailureCode.WITNESS_INVALID),
    ("claim threshold", lambda d, s: d["claim"].update(tau="3/5"), FailureCode.WITNESS_INVALID),
    ("claim flipped", lambda d, s: d["claim"].update(status="D"), FailureCode.WITNESS_INVALID),
    ("claim undetermined", lambda d, s: d["claim"].update(status="U"), FailureCode.WITNESS_INVALID),
    ("institutional", lambda d, s: d.update(cert_type="institutional"), FailureCode.WITNESS_INVALID),
    ("jurisdiction", lambda d, s: d["scope"].update(jurisdiction="UK"), FailureCode.SCOPE_MISMATCH),
    ("identity rule", lambda d, s: d["scope"].update(identity_rule_id="other-rule"), FailureCode.SCOPE_MISMATCH),
    ("record time", lambda d, s: d.update(record_time="2025-07-01T00:00:00Z"), FailureCode.SCOPE_MISMATCH),
    ("assumptions", lambda d, s: d["assumptions"].append("budget=1000"), FailureCode.SCOPE_MISMATCH),
    ("model hash", lambda d, s: d["provenance"].update(model_hash="f" * 64), FailureCode.PROVENANCE_FAIL),
    (
        "verifier version",
        lambda d, s: d["provenance"].update(verifier_version="other-verifier/9"),
        FailureCode.PROVENANCE_FAIL,
    ),
    ("replay seed", lambda d, s: d["provenance"].update(replay_seed="0" * 16), FailureCode.PROVENANCE_FAIL),
    ("t_int timestamp", lambda d, s: d["t_int"].update(timestamp="2025-01-16T00:00:00Z"), FailureCode.PROVENANCE_FAIL),
    (
        "record ref",
        lambda d, s: d["provenance"]["record_item_hashes"].__setitem__(
            d["provenance"]["record_item_hashes"].index(_leaked_ref(s)), "e" * 64
        ),
        FailureCode.PROVENANCE_FAIL,
    ),
    (
        "standing refs",
        lambda d, s: d["provenance"].update(record_item_hashes=[_inquiry_ref(s)]),
        FailureCode.STANDING_FAIL,
    ),
    ("formal with refs", lambda d, s: d.update(cert_type="formal"), FailureCode.STANDING_FAIL),
    ("unknown type", lambda d, s: d.update(cert_type="bogus"), FailureCode.FIELD_MISSING),
]


@pytest.mark.parametrize("mutate, expected", [(m, e) for _, m, e in TAMPERING], ids=[t[0] for t in TAMPERING])
def test_tampered_token_fails_one_check(checker, stage2_token, record_store, mutate, expected):
    document = copy.deepcopy(stage2_token.to_dict())
    mutate(document, record_store)
    result = checker.check(_resealed(document))
    assert not result.accepted
    assert _codes(result) == {expected}


def test_invalid_contract_hash(stage2_token, stage2_contract, record_store, scenario):
    broken = replace(stage2_contract, contract_hash="0" * 64)
    result = check_certificate(broken, stage2_token, record_store, scenario.scope_policy, scenario.standing_policy)
    assert _codes(result) == {FailureCode.HASH_MISMATCH}


def test_token_does_not_travel_to_another_record_time(checker, stage1_contract, stage2_token):
    result = checker.with_contract(stage1_contract).check(stage2_token)
    assert _codes(result) == {FailureCode.SCOPE_MISMATCH, FailureCode.PROVENANCE_FAIL}


def test_token_needs_its_record_items(checker, stage2_token, record_store):
    trimmed = record_store.without("committee-inquiry-report")
    assert _codes(checker.with_record_store(trimmed).check(stage2_token)) == {FailureCode.PROVENANCE_FAIL}
    assert _codes(checker.with_record_store(None).check(stage2_token)) == {
        FailureCode.PROVENANCE_FAIL,
        FailureCode.STANDING_FAIL,
    }


def test_failures_are_listed_once(checker, stage2_token):
    document = stage2_token.to_dict()
    document["scope"]["jurisdiction"] = "UK"
    document["scope"]["identity_rule_id"] = "other-rule"
    result = checker.check(_resealed(document))
    assert [f.to_dict() for f in result.failures] == [{"field": "scope", "code": "SCOPE_MISMATCH"}]


def test_forces_agrees_with_the_claim(stage2_token, tau):
    assert forces(stage2_token, ThresholdPredicate(0, tau)) is Forcing.ASSERTS
    assert forces(stage2_token, ThresholdPredicate(0, Fraction(9, 10))) is Forcing.NEITHER
    denied = replace(stage2_token, claim=replace(stage2_token.claim, status=Status.DENIED))
    assert forces(denied, ThresholdPredicate(0, tau)) is Forcing.NEITHER


def _scope():
    return CertScope("US", ("2025-06-01T00:00:00Z", "2025-06-01T00:00:00Z"), "officeholder-registry-v1")


def test_issuer_refuses_a_witness_that_does_not_entail_the_claim(stage2_contract, record_store, tau):
    claim = Claim.for_predicate(ThresholdPredicate(0, tau), "q-1", Status.DENIED)
    witness = ForcingWitness.bound(Interval("19/25", "21/25"), 5)
    with pytest.raises(WitnessRejected):
        issue_certificate(stage2_contract, claim, witness, (), _scope(), record_store)


def test_issuer_refuses_unresolved_refs(stage2_contract, record_store, tau):
    claim = Claim.for_predicate(ThresholdPredicate(0, tau), "q-1", Status.ASSERTED)
    witness = ForcingWitness.bound(Interval("19/25", "21/25"), 5)
    with pytest.raises(UnresolvedRecordRef):
        issue_certificate(stage2_contract, claim, witness, ["f" * 64], _scope(), record_store)
    with pytest.raises(UnresolvedRecordRef):
        earlier = stage2_contract.at_record_time("2025-03-01T00:00:00Z")
        issue_certificate(earlier, claim, witness, [_inquiry_ref(record_store)], _scope(), record_store)


def test_formal_certificate_checks(checker, stage2_contract, record_store, tau):
    claim = Claim.for_predicate(ThresholdPredicate(0, tau), "q-formal", Status.ASSERTED)
    token = issue_certificate(stage2_contract, claim, ForcingWitness.bound(Interval("3/4", "1"), 0), (), _scope())
    assert token.cert_type is CertType.FORMAL
    assert token.provenance.record_item_hashes == ()
    assert checker.check(token).accepted


def test_certificate_file(tmp_path, stage2_token):
    path = save_certificate(stage2_token, tmp_path / f"{stage2_token.cert_hash}.cert.json")
    loaded = load_certificate(path)
    assert loaded == stage2_token
    assert loaded.cert_hash == stage2_token.cert_hash
    assert path.read_text().strip() == canonical_dumps(stage2_token.to_dict())


def test_token_serialization_is_stable(stage2_token):
    document = stage2_token.to_dict()
    assert stage2_token.compute_hash() == stage2_token.cert_hash
    assert CertificateToken.from_dict(document).to_dict() == document


def _monitor_ref(record_store):
    return record_store.get("daily-monitor-report").item_hash


def test_record_certificate_stands_on_its_records(checker, stage2_contract, record_store, tau, tmp_path):
    token = issue_record_certificate(
        stage2_contract,
        "q-record",
        "daily monitor reports the tooth-social exchange",
        [_monitor_ref(record_store)],
        _scope(),
        record_store,
    )
    assert token.cert_type is CertType.INSTITUTIONAL
    assert token.witness is None
    assert token.claim.is_record_claim
    assert token.to_dict()["witness"] is None
    assert checker.check(token).accepted
    assert forces(token, ThresholdPredicate(0, tau)) is Forcing.NEITHER

    loaded = load_certificate(save_certificate(token, tmp_path / f"{token.cert_hash}.cert.json"))
    assert loaded == token
    assert loaded.claim.statement == "daily monitor reports the tooth-social exchange"


def test_record_certificate_below_standing(checker, stage2_contract, record_store):
    for refs in ([_inquiry_ref(record_store)], [_leaked_ref(record_store)]):
        token = issue_record_certificate(stage2_contract, "q-record", "on the record", refs, _scope(), record_store)
        assert _codes(checker.check(token)) == {FailureCode.STANDING_FAIL}


def test_record_certificate_needs_refs(stage2_contract, record_store):
    with pytest.raises(UnresolvedRecordRef):
        issue_record_certificate(stage2_contract, "q-record", "on the record", [], _scope(), record_store)


def test_institutional_token_cannot_smuggle_a_witness(checker, stage2_contract, record_store, stage2_token):
    token = issue_record_certificate(
        stage2_contract, "q-record", "on the record", [_monitor_ref(record_store)], _scope(), record_store
    )
    document = token.to_dict()
    document["witness"] = stage2_token.witness.to_dict()
    assert _codes(checker.check(_resealed(document))) == {FailureCode.WITNESS_INVALID}

    relabeled = token.to_dict()
    relabeled["cert_type"] = "mixed"
    result = checker.check(_resealed(relabeled))
    assert [f.to_dict() for f in result.failures] == [{"field": "witness", "code": "FIELD_MISSING"}]


def test_numeric_token_needs_its_witness(checker, stage2_token):
    document = stage2_token.to_dict()
    document["witness"] = None
    result = checker.check(_resealed(document))
    assert [f.to_dict() for f in result.failures] == [{"field": "witness", "code": "FIELD_MISSING"}]

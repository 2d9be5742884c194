import random
from dataclasses import replace
from fractions import Fraction

import pytest

from assertibility_gate.helpers.errors import ParseError, RecordStoreError, UnknownClass
from assertibility_gate.intervals import Interval
from assertibility_gate.records import (
    FeatureDim,
    FeatureSpec,
    QueryMeta,
    RecordStore,
    ScopeFailure,
    ScopePolicy,
    StandingPolicy,
    box_from_record,
    evaluate_scope,
    evaluate_standing,
    features_from_record,
    load_policies,
    record_asof,
)
from assertibility_gate.scenarios import DATA_DIR

from .factories import make_item

PRESS = FeatureSpec((FeatureDim("press_report", 4),))


def _press(count, authenticated=True):
    return [make_item(f"press-{i}", authenticated=authenticated) for i in range(count)]


@pytest.mark.parametrize("count, expected", [(2, Fraction(1, 2)), (0, Fraction(0)), (10, Fraction(1))])
def test_saturating_counts(count, expected):
    assert features_from_record(_press(count), PRESS) == [expected]


def test_unknown_evidence_class():
    with pytest.raises(UnknownClass):
        features_from_record([], FeatureSpec((FeatureDim("horoscope", 1),)))


def test_widened_dimension_spans_unverified_items():
    spec = FeatureSpec((FeatureDim("press_report", 4, "widen"), FeatureDim("inquiry_report", 1)))
    items = _press(1) + [make_item("leak", authenticated=False), make_item("wire", authenticated=False)]
    box = box_from_record(items, spec)
    assert box.dims == (Interval("1/4", "3/4"), Interval(0, 0))
    padded = box_from_record(items, spec, radius=Fraction(1, 10))
    assert padded.dims[1] == Interval("-1/10", "1/10")


def test_feature_values_stay_in_unit_interval():
    rng = random.Random(5)
    spec = FeatureSpec(tuple(FeatureDim(c, rng.randint(1, 5)) for c in ("press_report", "court_ruling")))
    for trial in range(200):
        items = [
            make_item(f"item-{trial}-{k}", rng.choice(["press_report", "court_ruling", "registry_entry"]))
            for k in range(rng.randint(0, 12))
        ]
        assert all(0 <= value <= 1 for value in features_from_record(items, spec))


def test_store_is_append_only():
    store = RecordStore(_press(2))
    with pytest.raises(RecordStoreError):
        store.append(make_item("press-0"))
    assert len(store) == 2


def test_completeness_attestation_travels_with_replay_copies(caplog):
    store = RecordStore(_press(2))
    assert not store.completeness_attested
    assert not store.copy().completeness_attested

    store.attest_completeness()
    assert store.completeness_attested
    assert "without a completeness certificate" in caplog.text
    assert store.copy().completeness_attested
    assert store.without("press-0").completeness_attested
    assert store.replacing(make_item("press-1", timestamp="2025-02-11T09:00:00Z")).completeness_attested
    assert RecordStore(_press(2), completeness_attested=True).completeness_attested


def test_record_asof_is_monotone_in_time():
    store = RecordStore(
        [
            make_item("late", timestamp="2025-05-30T16:00:00Z"),
            make_item("early", timestamp="2025-02-10T09:00:00Z"),
            make_item("middle", timestamp="2025-03-01T00:00:00Z"),
        ]
    )
    times = ["2025-01-01T00:00:00Z", "2025-02-10T09:00:00Z", "2025-03-01T00:00:00Z", "2025-06-01T00:00:00Z"]
    slices = [[item.item_id for item in record_asof(store, t)] for t in times]
    assert slices == [[], ["early"], ["early", "middle"], ["early", "middle", "late"]]
    for earlier, later in zip(slices, slices[1:]):
        assert set(earlier) <= set(later)


def test_resolve_respects_record_time_and_custody():
    item = make_item("report", timestamp="2025-05-30T16:00:00Z")
    store = RecordStore([item])
    assert store.resolve(item.item_hash) == item
    assert store.resolve(item.item_hash, "2025-06-01T00:00:00Z") == item
    assert store.resolve(item.item_hash, "2025-05-01T00:00:00Z") is None

    rechained = replace(item, provenance=replace(item.provenance, custody_chain=("someone-else",)))
    assert rechained.item_hash != item.item_hash
    assert store.replacing(rechained).resolve(item.item_hash) is None
    assert store.without("report").resolve(item.item_hash) is None
    assert store.resolve(item.item_hash) == item


def test_store_file(tmp_path):
    store = RecordStore(_press(2) + [make_item("inquiry", "inquiry_report", "2025-05-30T16:00:00Z")])
    path = store.save(tmp_path / "records.jsonl")
    loaded = RecordStore.load(path)
    assert [item.item_hash for item in loaded] == [item.item_hash for item in store]


def test_empty_content_hash_is_refused():
    with pytest.raises(ParseError):
        replace(make_item("x"), content_hash="")


def test_standing_counts_authenticated_items():
    policy = StandingPolicy("press-standing-v1", {"press_report": 1})
    assert not evaluate_standing(policy, _press(3, authenticated=False)).passed
    result = evaluate_standing(policy, [])
    assert result.missing == {"press_report": 1}
    assert evaluate_standing(policy, _press(1)).passed
    lenient = StandingPolicy("lenient", {"press_report": 1}, require_authenticated=False)
    assert evaluate_standing(lenient, _press(1, authenticated=False)).passed


def test_standing_is_monotone_under_additions():
    rng = random.Random(11)
    policy = StandingPolicy("mixed", {"press_report": 2, "inquiry_report": 1})
    classes = ["press_report", "inquiry_report", "court_ruling"]
    for trial in range(300):
        pool = [
            make_item(f"t{trial}-{k}", rng.choice(classes), authenticated=rng.random() < 0.6)
            for k in range(rng.randint(0, 8))
        ]
        cut = rng.randint(0, len(pool))
        if evaluate_standing(policy, pool[:cut]).passed:
            assert evaluate_standing(policy, pool).passed


def test_standing_policy_counts_are_checked():
    with pytest.raises(ParseError):
        StandingPolicy("bad", {"press_report": -1})


def test_scope_reports_first_failure():
    policy = ScopePolicy("scope", {"US"}, ("2025-01-01T00:00:00Z", "2025-12-31T23:59:59Z"), "registry-v1")
    ok = QueryMeta("US", "2025-06-01T00:00:00Z", "registry-v1")
    assert evaluate_scope(policy, ok).passed
    assert evaluate_scope(policy, replace(ok, jurisdiction="UK")).reason is ScopeFailure.JURISDICTION
    late = QueryMeta("US", "2026-01-01T00:00:00Z", "registry-v1")
    assert evaluate_scope(policy, late).reason is ScopeFailure.TIME_WINDOW
    assert evaluate_scope(policy, replace(ok, identity_rule_id="other")).reason is ScopeFailure.IDENTITY_RULE
    with pytest.raises(ParseError):
        ScopePolicy("reversed", {"US"}, ("2025-12-31T00:00:00Z", "2025-01-01T00:00:00Z"), "registry-v1")


def test_bundled_policies():
    scope, standing = load_policies(DATA_DIR / "tooth_social.policy.json")
    assert scope.policy_id == "tooth-social-scope-v1"
    assert standing.required_classes == {"press_report": 1}
    with pytest.raises(ParseError):
        load_policies(DATA_DIR / "tooth_social.net.json")

"""
Scenario replay: a record timeline and a list of dated queries, evaluated in order
against a fixed network, policy pair and contract template.

The contract template carries everything except the pinned hashes; they are filled
in from the loaded network when the scenario is built, and the record time is set
per query.
"""
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..certificates.models import (
    DEFAULT_CHALLENGE_ROLES,
    VERIFIER_VERSION,
    ConfigReference,
    DeploymentContract,
    RegimeDescriptor,
    config_hash_for,
)
from ..contest.history import EntitlementHistory
from ..decision.models import Status
from ..gate.interface import AssertibilityGate, render_transcript, threshold_bounds
from ..gate.models import InterfaceOutput, Query
from ..helpers.errors import ConfigurationError, ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import format_timestamp, parse_rational, parse_timestamp, read_json
from ..intervals import Interval
from ..network.loader import load_network
from ..network.models import NetworkModel
from ..records.models import RecordItem, ScopePolicy, StandingPolicy
from ..records.policies import load_policies
from ..records.store import RecordStore

logger = setup_logger(name=__name__)

DATA_DIR = Path(__file__).parent / "data"
BUNDLED_SCENARIOS = ("tooth_social", "tooth_social_exoneration")


def build_contract(
    template: dict,
    network: NetworkModel,
    record_time: Union[str, datetime, None] = None,
) -> DeploymentContract:
    """
    Seal a contract from a template, pinning the network hash and the config hash.

    :param template: (dict) Contract fields; ``t_int`` needs only a timestamp
    :param network: (NetworkModel) Network to pin
    :param record_time: (datetime or str) Overrides the template record time
    :return: (DeploymentContract)
    """
    if not isinstance(template, dict) or "t_int" not in template or "regime" not in template:
        raise ConfigurationError("Contract template needs 'regime' and 't_int'")
    t_int = dict(template["t_int"])
    if t_int.get("model_hash") and t_int["model_hash"] != network.model_hash:
        logger.error(f"Template pins model {t_int['model_hash'][:12]}, network is {network.model_hash[:12]}")
        raise ConfigurationError("Contract template pins a different network")
    regime = RegimeDescriptor.from_dict(template["regime"])
    radius = parse_rational(template.get("input_radius", 0))
    try:
        return DeploymentContract.build(
            scope_policy_id=template["scope_policy_id"],
            regime=regime,
            t_int=ConfigReference(
                timestamp=t_int["timestamp"],
                model_hash=network.model_hash,
                verifier_version=t_int.get("verifier_version", VERIFIER_VERSION),
                config_hash=config_hash_for(regime, radius),
            ),
            budget=template["budget"],
            n_max=template["n_max"],
            standing_policy_id=template["standing_policy_id"],
            tau=template["tau"],
            record_time=record_time if record_time is not None else template["record_time"],
            input_radius=radius,
            challenge_roles=tuple(template.get("challenge_roles", DEFAULT_CHALLENGE_ROLES)),
        )
    except KeyError as e:
        raise ConfigurationError(f"Contract template is missing {e}")


@dataclass(frozen=True)
class ScenarioQuery(object):
    timestamp: datetime
    query: Query
    expected_status: Optional[Status] = None


@dataclass(frozen=True)
class Scenario(object):
    name: str
    network: NetworkModel
    scope_policy: ScopePolicy
    standing_policy: StandingPolicy
    contract_template: dict
    timeline: Tuple[RecordItem, ...]
    queries: Tuple[ScenarioQuery, ...]
    description: str = ""

    def __post_init__(self):
        stamps = [item.timestamp for item in self.timeline]
        if stamps != sorted(stamps):
            raise ParseError(f"Scenario {self.name!r} timeline is not in timestamp order")

    def contract_at(self, record_time: Union[str, datetime]) -> DeploymentContract:
        return build_contract(self.contract_template, self.network, record_time)


def _sibling(base: Path, reference: str) -> Path:
    path = Path(reference)
    return path if path.is_absolute() else base / path


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read a ``.scenario.json`` file; network, policy and contract paths are relative to it.
    """
    path = Path(path)
    document = read_json(path)
    for key in ("name", "network", "policies", "contract", "timeline", "queries"):
        if key not in document:
            raise ParseError(f"Scenario {path} is missing {key!r}")
    base = path.parent
    scope_policy, standing_policy = load_policies(_sibling(base, document["policies"]))
    contract_template = document["contract"]
    if isinstance(contract_template, str):
        contract_template = read_json(_sibling(base, contract_template))
    queries = []
    for entry in document["queries"]:
        expected = entry.get("expected_status")
        queries.append(
            ScenarioQuery(
                timestamp=parse_timestamp(entry["timestamp"]),
                query=Query.from_dict(entry["query"]),
                expected_status=Status(expected) if expected is not None else None,
            )
        )
    return Scenario(
        name=document["name"],
        network=load_network(_sibling(base, document["network"])),
        scope_policy=scope_policy,
        standing_policy=standing_policy,
        contract_template=contract_template,
        timeline=tuple(RecordItem.from_dict(item) for item in document["timeline"]),
        queries=tuple(queries),
        description=document.get("description", ""),
    )


def bundled_scenario(name: str) -> Scenario:
    if name not in BUNDLED_SCENARIOS:
        raise ConfigurationError(f"No bundled scenario {name!r}; choose from {', '.join(BUNDLED_SCENARIOS)}")
    return load_scenario(DATA_DIR / f"{name}.scenario.json")


@dataclass(frozen=True)
class ScenarioRow(object):
    query_id: str
    record_time: datetime
    status: Status
    reason: Optional[str]
    bounds: Optional[Interval]
    stages_used: Optional[int]
    cost_spent: Optional[int]
    expected: Optional[Status]

    @property
    def matched(self) -> bool:
        return self.expected is None or self.expected is self.status

    def cells(self) -> List[str]:
        return [
            self.query_id,
            format_timestamp(self.record_time),
            self.status.value,
            self.reason or "-",
            str(self.bounds) if self.bounds is not None else "-",
            str(self.stages_used) if self.stages_used is not None else "-",
            str(self.cost_spent) if self.cost_spent is not None else "-",
            self.expected.value if self.expected is not None else "-",
        ]


TABLE_HEADER = ["query_id", "record_time", "status", "reason", "bounds", "stages", "cost", "expected"]


@dataclass
class ScenarioReport(object):
    name: str
    rows: List[ScenarioRow] = field(default_factory=list)
    outputs: List[InterfaceOutput] = field(default_factory=list)
    transcripts: Dict[str, str] = field(default_factory=dict)
    contracts: Dict[str, DeploymentContract] = field(default_factory=dict)
    history: EntitlementHistory = field(default_factory=EntitlementHistory)
    record_store: RecordStore = field(default_factory=RecordStore)

    @property
    def statuses(self) -> List[Status]:
        return [row.status for row in self.rows]

    @property
    def mismatches(self) -> List[ScenarioRow]:
        return [row for row in self.rows if not row.matched]

    @property
    def all_matched(self) -> bool:
        return not self.mismatches

    def table(self) -> str:
        lines = [TABLE_HEADER] + [row.cells() for row in self.rows]
        widths = [max(len(line[i]) for line in lines) for i in range(len(TABLE_HEADER))]
        rendered = ["  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in lines]
        rendered.insert(1, "  ".join("-" * width for width in widths))
        return "\n".join(rendered) + "\n"


def run_scenario(
    scenario: Scenario,
    history: Optional[EntitlementHistory] = None,
    expectations: Optional[Dict[str, Status]] = None,
) -> ScenarioReport:
    """
    Replay the timeline and evaluate every query as of its timestamp.

    :param scenario: (Scenario)
    :param history: (EntitlementHistory) Log to record issuance in; a fresh one by default
    :param expectations: (dict) query_id -> Status overriding the scenario's expected statuses
    :return: (ScenarioReport)
    """
    report = ScenarioReport(name=scenario.name, history=history if history is not None else EntitlementHistory())
    pending = list(scenario.timeline)
    for entry in sorted(scenario.queries, key=lambda q: q.timestamp):
        while pending and pending[0].timestamp <= entry.timestamp:
            report.record_store.append(pending.pop(0))

        contract = scenario.contract_at(entry.timestamp)
        gate = AssertibilityGate(
            contract,
            scenario.network,
            report.record_store,
            scenario.scope_policy,
            scenario.standing_policy,
        )
        output = gate.evaluate(entry.query)
        report.history.record_issuance(output)

        decided = gate.last_decide_result
        expected = entry.expected_status
        if expectations and entry.query.query_id in expectations:
            expected = expectations[entry.query.query_id]
        report.rows.append(
            ScenarioRow(
                query_id=output.query_id,
                record_time=output.record_time,
                status=output.status,
                reason=output.reason.value if output.reason is not None else None,
                bounds=threshold_bounds(output),
                stages_used=decided.stages_used if decided is not None else None,
                cost_spent=decided.cost_spent if decided is not None else None,
                expected=expected,
            )
        )
        report.outputs.append(output)
        report.contracts[output.query_id] = contract
        report.transcripts[output.query_id] = render_transcript(output, contract, entry.query.claim_text)

    for row in report.mismatches:
        logger.warning(f"{scenario.name}: {row.query_id} is {row.status.value}, expected {row.expected.value}")
    logger.info(f"{scenario.name}: statuses {[s.value for s in report.statuses]}")

    return report

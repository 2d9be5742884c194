"""
Command-line front door.

Exit codes: 0 success, 1 semantic failure (rejected certificate, unmet
expectation, broken log), 2 configuration or unreadable input, 64 usage.
"""
import argparse
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import appdirs
from dotenv import load_dotenv

from .certificates.checker import CertificateChecker, check_certificate
from .certificates.files import load_certificate_document, load_contract, save_certificate, save_contract
from .contest.history import EntitlementHistory, replay_verify
from .contest.models import Challenge, ChallengeGround, ChallengerRole
from .decision.models import Status
from .gate.interface import AssertibilityGate, render_transcript
from .gate.models import InterfaceOutput, load_query
from .helpers.canonical import canonical_dumps
from .helpers.errors import (
    ConfigurationError,
    DimensionMismatch,
    GateError,
    HashMismatch,
    IndexOutOfRange,
    ParseError,
    UnauthorizedChallenger,
    UnknownCertificate,
    UnknownClass,
)
from .helpers.logger import configure_package_loggers, setup_logger
from .helpers.utilities import write_text
from .network.loader import load_network
from .records.policies import load_policies
from .records.store import RecordStore
from .scenarios.runner import BUNDLED_SCENARIOS, ScenarioReport, bundled_scenario, load_scenario, run_scenario

logger = setup_logger(name=__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_USAGE = 64

APP_NAME = "assertibility_gate"

CONFIG_ERRORS = (
    ConfigurationError,
    ParseError,
    HashMismatch,
    DimensionMismatch,
    IndexOutOfRange,
    UnknownClass,
    OSError,
)


class GateArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _configure_logging(log_to_file: bool):
    """Re-apply LOGGING_LEVEL after .env is loaded and attach the optional log file."""
    level = os.getenv("LOGGING_LEVEL", "info")
    log_file = os.getenv("GATE_LOG_FILE")
    if log_to_file and not log_file:
        log_dir = Path(appdirs.user_log_dir(APP_NAME))
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = str(log_dir / "gate.log")
    configure_package_loggers(APP_NAME, level=level, log_filename=log_file)


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _write_verdict(output: InterfaceOutput, transcript: str, out_dir: Path) -> List[Path]:
    """Verdict first, then certificates, then the transcript; the transcript never exists alone."""
    written = [write_text(out_dir / f"{output.query_id}.verdict.json", canonical_dumps(output.to_dict()))]
    for token in output.certificates:
        written.append(save_certificate(token, out_dir / f"{token.cert_hash}.cert.json"))
    written.append(write_text(out_dir / f"{output.query_id}.transcript.txt", transcript))
    return written


def cmd_evaluate(args) -> int:
    contract = load_contract(args.contract)
    network = load_network(Path(args.net))
    record_store = RecordStore.load(args.records)
    scope_policy, standing_policy = load_policies(args.policies)
    query = load_query(args.query)

    gate = AssertibilityGate(contract, network, record_store, scope_policy, standing_policy)
    output = gate.evaluate(query)
    transcript = render_transcript(output, contract, query.claim_text)
    _write_verdict(output, transcript, Path(args.out))
    if args.log:
        log_path = Path(args.log)
        history = EntitlementHistory.load(log_path, attach=True) if log_path.exists() else EntitlementHistory(log_path)
        history.record_issuance(output)

    _emit(canonical_dumps(output.to_dict()) if args.format == "json" else transcript)
    return EXIT_OK


def cmd_check(args) -> int:
    contract = load_contract(args.contract, verify=False)
    record_store = RecordStore.load(args.records)
    scope_policy, standing_policy = load_policies(args.policies)
    document = load_certificate_document(args.cert)

    result = check_certificate(contract, document, record_store, scope_policy, standing_policy)
    if args.format == "json":
        _emit(canonical_dumps(result.to_dict()))
    elif result.accepted:
        _emit("accepted")
    else:
        _emit("rejected: " + ", ".join(f"{f.field}={f.code.value}" for f in result.failures))
    return EXIT_OK if result.accepted else EXIT_FAILURE


def _parse_expectations(values: Optional[Sequence[str]]) -> Dict[str, Status]:
    expectations = {}
    for value in values or ():
        query_id, sep, status = value.partition("=")
        if not sep:
            raise ConfigurationError(f"--expect takes QUERY_ID=STATUS, got {value!r}")
        try:
            expectations[query_id] = Status(status)
        except ValueError:
            raise ConfigurationError(f"Unknown status {status!r} in --expect")
    return expectations


def _write_scenario(report: ScenarioReport, out_dir: Path):
    for output in report.outputs:
        _write_verdict(output, report.transcripts[output.query_id], out_dir)
        save_contract(report.contracts[output.query_id], out_dir / f"{output.query_id}.contract.json")
    report.record_store.save(out_dir / "records.jsonl")
    report.history.save(out_dir / "entitlement_history.jsonl")


def cmd_scenario(args) -> int:
    scenario = load_scenario(args.file) if args.file else bundled_scenario(args.name)
    report = run_scenario(scenario, expectations=_parse_expectations(args.expect))
    if args.out:
        _write_scenario(report, Path(args.out))

    if args.format == "json":
        _emit(canonical_dumps({"scenario": report.name, "verdicts": [o.to_dict() for o in report.outputs]}))
    else:
        _emit(report.table())
    if not report.all_matched:
        for row in report.mismatches:
            sys.stderr.write(f"mismatch: {row.query_id} is {row.status.value}, expected {row.expected.value}\n")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_challenge(args) -> int:
    contract = load_contract(args.contract)
    record_store = RecordStore.load(args.records)
    scope_policy, standing_policy = load_policies(args.policies)
    history = EntitlementHistory.load(args.log, attach=True)

    challenge = Challenge(
        challenge_id=args.challenge_id,
        challenger_role=args.role,
        target_cert_hash=args.cert_hash,
        ground=args.ground,
        submitted_at=args.submitted_at or contract.record_time,
    )
    try:
        history.submit_challenge(challenge, contract.challenge_roles)
    except (UnknownCertificate, UnauthorizedChallenger) as e:
        sys.stderr.write(f"challenge refused: {e}\n")
        return EXIT_FAILURE

    checker = CertificateChecker(contract, record_store, scope_policy, standing_policy)
    outcome = history.recheck(challenge, checker)
    result = outcome.to_dict()
    if outcome.upheld:
        revised = history.revise_status(outcome.query_id, outcome)
        result["revised"] = revised.to_dict()
        if args.out:
            write_text(Path(args.out) / f"{revised.query_id}.verdict.json", canonical_dumps(revised.to_dict()))

    if args.format == "json":
        _emit(canonical_dumps(result))
    else:
        _emit(result["outcome"])
    return EXIT_OK


def cmd_replay(args) -> int:
    result = replay_verify(Path(args.log))
    if args.format == "json":
        _emit(canonical_dumps({"valid": result.valid, "bad_seq": result.bad_seq, "reason": result.reason}))
    else:
        _emit("valid" if result.valid else f"invalid at seq {result.bad_seq}: {result.reason}")
    return EXIT_OK if result.valid else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = GateArgumentParser(prog="assertibility-gate", description="Certificate-gated assertion interface")
    parser.add_argument("--log-to-file", action="store_true", help="also log to GATE_LOG_FILE or the user log dir")
    common = GateArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")

    sub = parser.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True

    evaluate = sub.add_parser("evaluate", parents=[common], help="evaluate one query")
    evaluate.add_argument("--contract", required=True)
    evaluate.add_argument("--net", required=True)
    evaluate.add_argument("--records", required=True)
    evaluate.add_argument("--policies", required=True)
    evaluate.add_argument("--query", required=True)
    evaluate.add_argument("--out", default=".")
    evaluate.add_argument("--log", help="entitlement history to record the issuance in")
    evaluate.set_defaults(handler=cmd_evaluate)

    check = sub.add_parser("check", parents=[common], help="re-verify a certificate")
    check.add_argument("--cert", required=True)
    check.add_argument("--contract", required=True)
    check.add_argument("--records", required=True)
    check.add_argument("--policies", required=True)
    check.set_defaults(handler=cmd_check)

    scenario = sub.add_parser("scenario", parents=[common], help="replay a scenario timeline")
    source = scenario.add_mutually_exclusive_group(required=True)
    source.add_argument("--name", choices=BUNDLED_SCENARIOS)
    source.add_argument("--file")
    scenario.add_argument("--out")
    scenario.add_argument("--expect", action="append", metavar="QUERY_ID=STATUS")
    scenario.set_defaults(handler=cmd_scenario)

    challenge = sub.add_parser("challenge", parents=[common], help="challenge an issued certificate")
    challenge.add_argument("--log", required=True)
    challenge.add_argument("--contract", required=True)
    challenge.add_argument("--records", required=True)
    challenge.add_argument("--policies", required=True)
    challenge.add_argument("--cert-hash", required=True)
    challenge.add_argument("--role", required=True, help=f"e.g. {', '.join(r.value for r in ChallengerRole)}")
    challenge.add_argument("--ground", required=True, choices=[g.value for g in ChallengeGround])
    challenge.add_argument("--challenge-id", required=True)
    challenge.add_argument("--submitted-at")
    challenge.add_argument("--out")
    challenge.set_defaults(handler=cmd_challenge)

    replay = sub.add_parser("replay", parents=[common], help="verify an entitlement history")
    replay.add_argument("--log", required=True)
    replay.set_defaults(handler=cmd_replay)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_to_file)
    try:
        return args.handler(args)
    except CONFIG_ERRORS as e:
        logger.error(f"{args.verb}: {e}")
        sys.stderr.write(f"configuration error: {e}\n")
        return EXIT_CONFIG
    except GateError as e:
        logger.error(f"{args.verb}: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

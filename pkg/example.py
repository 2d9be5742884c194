#! /usr/bin/env python3
"""
Walk through the bundled scenario, then challenge the issued certificate.

The "os.environ.get()" references below read variables from the ".env" file you create.

Example .env file contents:
LOGGING_LEVEL = "warning"
example_out_dir = "./example_run"
"""

import os
from dataclasses import replace
from pathlib import Path

# `pip install python-dotenv` to load this package
from dotenv import load_dotenv

from assertibility_gate import CertificateChecker
from assertibility_gate.contest import Challenge
from assertibility_gate.helpers import configure_package_loggers
from assertibility_gate.scenarios import bundled_scenario, run_scenario

#  Load user variables from ".env" file or from OS.
load_dotenv()
#  Loggers were created at import time; apply LOGGING_LEVEL from ".env" to them now.
configure_package_loggers("assertibility_gate")


def scenario_example():
    print("Example of replaying a record timeline")
    report = run_scenario(bundled_scenario("tooth_social"))
    print(report.table())
    for query_id, transcript in report.transcripts.items():
        print(f"{query_id}: {transcript}")
    return report


def challenge_example(report):
    print("Example of an upheld provenance challenge")
    scenario = bundled_scenario("tooth_social")
    output = report.outputs[-1]
    token = output.certificates[0]
    contract = report.contracts[output.query_id]

    leaked = report.record_store.get("leaked-documents")
    recustodied = report.record_store.replacing(
        replace(leaked, provenance=replace(leaked.provenance, custody_chain=("unknown", "tabloid-desk")))
    )
    checker = CertificateChecker(contract, recustodied, scenario.scope_policy, scenario.standing_policy)

    challenge = Challenge("example-1", "auditor", token.cert_hash, "provenance_defect", contract.record_time)
    report.history.submit_challenge(challenge, contract.challenge_roles)
    outcome = report.history.recheck(challenge, checker)
    print(f"{outcome.to_dict()=}")
    if outcome.upheld:
        revised = report.history.revise_status(output.query_id, outcome)
        print(f"{revised.to_dict()=}")

    out_dir = Path(os.environ.get("example_out_dir", "./example_run"))
    print(f"History written to {report.history.save(out_dir / 'entitlement_history.jsonl')}")


if __name__ == "__main__":
    challenge_example(scenario_example())

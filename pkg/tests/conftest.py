from fractions import Fraction

import pytest

from assertibility_gate.certificates import CertificateChecker
from assertibility_gate.scenarios import bundled_scenario, run_scenario


@pytest.fixture(scope="session")
def scenario():
    return bundled_scenario("tooth_social")


@pytest.fixture(scope="session")
def exoneration():
    return bundled_scenario("tooth_social_exoneration")


@pytest.fixture
def report(scenario):
    return run_scenario(scenario)


@pytest.fixture
def stage1_contract(report):
    return report.contracts["tooth-social-stage-1"]


@pytest.fixture
def stage2_contract(report):
    return report.contracts["tooth-social-stage-2"]


@pytest.fixture
def record_store(report):
    return report.record_store


@pytest.fixture
def stage2_output(report):
    return report.outputs[1]


@pytest.fixture
def stage2_token(stage2_output):
    return stage2_output.certificates[0]


@pytest.fixture
def checker(stage2_contract, record_store, scenario):
    return CertificateChecker(stage2_contract, record_store, scenario.scope_policy, scenario.standing_policy)


@pytest.fixture
def tau():
    return Fraction(7, 10)

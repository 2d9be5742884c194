from .runner import (
    BUNDLED_SCENARIOS,
    DATA_DIR,
    Scenario,
    ScenarioQuery,
    ScenarioReport,
    ScenarioRow,
    build_contract,
    bundled_scenario,
    load_scenario,
    run_scenario,
)

__all__ = [
    "BUNDLED_SCENARIOS",
    "DATA_DIR",
    "Scenario",
    "ScenarioQuery",
    "ScenarioReport",
    "ScenarioRow",
    "build_contract",
    "bundled_scenario",
    "load_scenario",
    "run_scenario",
]

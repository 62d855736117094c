"""Deterministic discrete-event simulator of Wi-Fi / LTE-u channel sharing."""

__version__ = "0.1.0"

from .engine import Engine, SimulationError
from .medium import Burst, BurstKind, Medium, Topology
from .metrics import audit_compliance, jain_index, summarize
from .runner import RunArtifacts, run_scenario
from .scenario import Scenario, ScenarioError, load_scenario, scenario_from_dict
from .trace import TraceLog, TraceRecord, parse_trace

__all__ = [
    "__version__",
    "Engine", "SimulationError",
    "Burst", "BurstKind", "Medium", "Topology",
    "audit_compliance", "jain_index", "summarize",
    "RunArtifacts", "run_scenario",
    "Scenario", "ScenarioError", "load_scenario", "scenario_from_dict",
    "TraceLog", "TraceRecord", "parse_trace",
]

"""Evaluation harness: scenarios, deterministic checks, judges, pass^k."""

from .checks import (
    CheckResult,
    ReferenceError,
    file_set_check,
    numeric_file_compare,
    text_golden_check,
)
from .fixtures import FixtureError, generate_fixture, random_delivery
from .judge import HttpJudge, JudgeVerdict, StubJudge, judge_check, register_adapter
from .passk import (
    DEFAULT_ALPHA,
    DEPLOYMENT_MIN_K,
    DEVELOPMENT_K,
    PassKPolicy,
    basis_policy,
    min_k_for,
    pass_lower_bound,
)
from .runner import EvalReport, RunOutcome, RunTrace, run_scenario
from .scenario import CheckSpec, Environment, Scenario, StageItem, load_scenario, parse_scenario

__all__ = [
    "CheckResult",
    "CheckSpec",
    "DEFAULT_ALPHA",
    "DEPLOYMENT_MIN_K",
    "DEVELOPMENT_K",
    "Environment",
    "EvalReport",
    "FixtureError",
    "HttpJudge",
    "JudgeVerdict",
    "PassKPolicy",
    "ReferenceError",
    "RunOutcome",
    "RunTrace",
    "Scenario",
    "StageItem",
    "StubJudge",
    "basis_policy",
    "file_set_check",
    "generate_fixture",
    "judge_check",
    "load_scenario",
    "min_k_for",
    "numeric_file_compare",
    "parse_scenario",
    "pass_lower_bound",
    "random_delivery",
    "register_adapter",
    "run_scenario",
    "text_golden_check",
]

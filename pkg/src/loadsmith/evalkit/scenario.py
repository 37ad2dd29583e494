"""Scenario files: what to stage, what to run, what must hold afterwards.

A scenario is the unit of curated evaluation: an environment (inputs plus
the subject command), an ordered list of checks, and the repetition count
k. Scenarios live as JSON files (conventionally under ``scenarios/``) with
reference data beside them; all reference paths resolve relative to the
scenario file so a scenario directory is self-contained and
version-controllable.

Format (see ``scenarios/`` for live examples):

.. code-block:: json

    {
      "id": "case-replay",
      "description": "...",
      "k": 3,
      "alpha": 0.05,
      "environment": {
        "stage": [{"source": "inputs/delivery.yaml", "dest": "delivery.yaml"}],
        "subject_command": ["{python}", "pipeline.py"],
        "record": {"toolkit": "loadsmith"}
      },
      "checks": [
        {"kind": "numeric_file_compare", "actual": "out.json",
         "reference": "references/out.json", "abs_tol": 0, "rel_tol": 1e-12},
        {"kind": "file_set", "dir": "decks", "expected": ["limit_load_2.inp"]},
        {"kind": "text_golden", "actual": "envelope.md",
         "reference": "references/envelope.md"},
        {"kind": "judge", "adapter": "stub", "artifacts": ["pipeline.py"],
         "rubric": "require: 1\\.04"}
      ]
    }

``{python}`` in the subject command expands to the running interpreter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import SchemaError

CHECK_KINDS = ("numeric_file_compare", "file_set", "text_golden", "judge")


@dataclass(frozen=True)
class StageItem:
    source: str  # relative to the scenario file's directory
    dest: str  # relative to the run working directory


@dataclass(frozen=True)
class CheckSpec:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Environment:
    stage: tuple[StageItem, ...]
    subject_command: tuple[str, ...]
    record: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    id: str
    description: str
    environment: Environment
    checks: tuple[CheckSpec, ...]
    k: int
    alpha: float = 0.05
    base_dir: Path = Path(".")

    def __post_init__(self):
        if self.k < 1:
            raise SchemaError(f"scenario {self.id!r}: k must be >= 1")
        if not self.checks:
            raise SchemaError(f"scenario {self.id!r}: at least one check is required")


def _require(data: dict, key: str, location: str):
    if key not in data:
        raise SchemaError(f"scenario missing field {key!r}", location=f"{location}.{key}")
    return data[key]


def _parse_check(raw: dict, idx: int) -> CheckSpec:
    loc = f"checks[{idx}]"
    kind = _require(raw, "kind", loc)
    if kind not in CHECK_KINDS:
        raise SchemaError(f"unknown check kind {kind!r}", location=f"{loc}.kind")
    params = {k: v for k, v in raw.items() if k != "kind"}
    required = {
        "numeric_file_compare": ("actual", "reference"),
        "file_set": ("dir", "expected"),
        "text_golden": ("actual", "reference"),
        "judge": ("adapter", "artifacts", "rubric"),
    }[kind]
    for name in required:
        if name not in params:
            raise SchemaError(
                f"{kind} check missing field {name!r}", location=f"{loc}.{name}"
            )
    for tol in ("abs_tol", "rel_tol"):
        if tol in params and params[tol] < 0:
            raise SchemaError(f"{tol} must be >= 0", location=f"{loc}.{tol}")
    return CheckSpec(kind=kind, params=params)


def parse_scenario(text: str, base_dir: str | Path = ".") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid scenario JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaError("scenario must be a JSON object")

    env_raw = _require(data, "environment", "$")
    stage = tuple(
        StageItem(source=_require(item, "source", f"environment.stage[{i}]"),
                  dest=_require(item, "dest", f"environment.stage[{i}]"))
        for i, item in enumerate(env_raw.get("stage", []))
    )
    command = tuple(_require(env_raw, "subject_command", "environment"))
    if not command:
        raise SchemaError("subject_command must not be empty", location="environment.subject_command")
    environment = Environment(
        stage=stage, subject_command=command, record=dict(env_raw.get("record", {}))
    )

    checks = tuple(
        _parse_check(raw, i) for i, raw in enumerate(_require(data, "checks", "$"))
    )

    return Scenario(
        id=_require(data, "id", "$"),
        description=data.get("description", ""),
        environment=environment,
        checks=checks,
        k=int(_require(data, "k", "$")),
        alpha=float(data.get("alpha", 0.05)),
        base_dir=Path(base_dir),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)

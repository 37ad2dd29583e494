"""Delivery ingestion: detect, parse, validate and canonically serialize.

The delivery file schema is this toolkit's contract (documented in
``schema/delivery.schema.json``):

.. code-block:: json

    {
      "name": "...", "version": 2,
      "units": {"force": "klbf", "moment": "klbf·in"},
      "coordinate_system": "engine_cs",
      "point_coordinates": {"bearing": [0.0, 0.0, 0.0]},
      "load_cases": [
        {"id": 1, "label": "cruise",
         "point_loads": {"bearing": {"fx": 1.0, "fy": 0.0, "fz": 0.0,
                                      "mx": 0.0, "my": 0.0, "mz": 0.0}}}
      ]
    }

JSON is the canonical form; YAML is accepted on input restricted to plain
scalars, mappings and sequences (anchors, aliases and tags are rejected so
a delivery file can always be audited line by line). Missing components are
schema errors, never implicit zeros, and unit tokens outside the closed
alias table are refused: silent coercion is exactly the failure class this
layer exists to surface.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import InputSyntaxError, LoadsmithError, SchemaError
from .model import (
    COMPONENT_ORDER,
    ComponentSet,
    LoadCase,
    LoadsDelivery,
    UnitSystem,
    point_names,
)


class DeliveryFormat(enum.Enum):
    JSON = "json"
    YAML = "yaml"


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    message: str
    location: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "findings": [
                {
                    "severity": f.severity,
                    "code": f.code,
                    "message": f.message,
                    "location": f.location,
                }
                for f in self.findings
            ],
        }


def _decode(raw: str | bytes) -> str:
    if isinstance(raw, bytes):
        return raw.decode("utf-8")
    return raw


def detect_format(raw: str | bytes) -> DeliveryFormat:
    """Classify raw delivery text: leading '{' or '[' means JSON, else YAML.

    Raises:
        InputSyntaxError: On empty (or all-whitespace) input.
    """
    text = _decode(raw).lstrip()
    if not text:
        raise InputSyntaxError("empty delivery input", location="offset 0")
    return DeliveryFormat.JSON if text[0] in "{[" else DeliveryFormat.YAML


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputSyntaxError(
            f"invalid JSON: {exc.msg}", location=f"line {exc.lineno}, column {exc.colno}"
        ) from exc


def _load_yaml(text: str):
    # Pre-scan parser events so anchors/aliases and explicit tags are
    # rejected up front instead of silently expanding.
    try:
        for event in yaml.parse(text):
            if isinstance(event, yaml.AliasEvent):
                mark = event.start_mark
                raise InputSyntaxError(
                    "YAML aliases are not allowed in delivery files",
                    location=f"line {mark.line + 1}, column {mark.column + 1}",
                )
            anchor = getattr(event, "anchor", None)
            if anchor is not None:
                mark = event.start_mark
                raise InputSyntaxError(
                    f"YAML anchor {anchor!r} is not allowed in delivery files",
                    location=f"line {mark.line + 1}, column {mark.column + 1}",
                )
            tag = getattr(event, "tag", None)
            if tag is not None:
                mark = event.start_mark
                raise InputSyntaxError(
                    f"YAML tag {tag!r} is not allowed in delivery files",
                    location=f"line {mark.line + 1}, column {mark.column + 1}",
                )
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise InputSyntaxError(f"invalid YAML: {exc.problem}", location=where) from exc
    except yaml.YAMLError as exc:
        raise InputSyntaxError(f"invalid YAML: {exc}", location="unknown position") from exc


def _expect_mapping(node, location: str) -> dict:
    if not isinstance(node, dict):
        raise SchemaError(f"expected a mapping at {location}", location=location)
    return node


def _expect_keys(node: dict, required: tuple[str, ...], optional: tuple[str, ...], location: str):
    for key in required:
        if key not in node:
            raise SchemaError(f"missing field {key!r} at {location}", location=f"{location}.{key}")
    for key in node:
        if key not in required and key not in optional:
            raise SchemaError(f"unknown field {key!r} at {location}", location=f"{location}.{key}")


def _expect_number(value, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number at {location}", location=location)
    return float(value)


def _expect_int(value, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected an integer at {location}", location=location)
    return value


def _expect_text(value, location: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"expected a string at {location}", location=location)
    return value


def parse_delivery(raw: str | bytes, fmt: DeliveryFormat | None = None) -> LoadsDelivery:
    """Parse raw JSON/YAML text into a LoadsDelivery.

    The parsed value is independent of the carrier format; unit aliases are
    normalized. Errors name the offending field or file position.

    Args:
        raw: Delivery file content (UTF-8 text or bytes).
        fmt: Carrier format; auto-detected when omitted.
    """
    text = _decode(raw)
    if fmt is None:
        fmt = detect_format(text)
    data = _load_json(text) if fmt is DeliveryFormat.JSON else _load_yaml(text)

    root = _expect_mapping(data, "$")
    _expect_keys(
        root,
        required=("name", "version", "units", "load_cases"),
        optional=("coordinate_system", "point_coordinates"),
        location="$",
    )

    units_node = _expect_mapping(root["units"], "units")
    _expect_keys(units_node, required=("force", "moment"), optional=(), location="units")
    units = UnitSystem(
        _expect_text(units_node["force"], "units.force"),
        _expect_text(units_node["moment"], "units.moment"),
    )

    coordinate_system = None
    if "coordinate_system" in root:
        coordinate_system = _expect_text(root["coordinate_system"], "coordinate_system")

    point_coordinates = None
    if "point_coordinates" in root:
        coords_node = _expect_mapping(root["point_coordinates"], "point_coordinates")
        point_coordinates = {}
        for name, xyz in coords_node.items():
            loc = f"point_coordinates.{name}"
            if not isinstance(xyz, list) or len(xyz) != 3:
                raise SchemaError(f"expected [x, y, z] at {loc}", location=loc)
            point_coordinates[_expect_text(name, loc)] = tuple(
                _expect_number(v, f"{loc}[{i}]") for i, v in enumerate(xyz)
            )

    cases_node = root["load_cases"]
    if not isinstance(cases_node, list) or not cases_node:
        raise SchemaError("load_cases must be a non-empty list", location="load_cases")

    cases = []
    for idx, case_node in enumerate(cases_node):
        loc = f"load_cases[{idx}]"
        case_map = _expect_mapping(case_node, loc)
        _expect_keys(case_map, required=("id", "point_loads"), optional=("label",), location=loc)
        case_id = _expect_int(case_map["id"], f"{loc}.id")
        label = _expect_text(case_map["label"], f"{loc}.label") if "label" in case_map else None
        points_node = _expect_mapping(case_map["point_loads"], f"{loc}.point_loads")
        if not points_node:
            raise SchemaError(f"empty point_loads at {loc}", location=f"{loc}.point_loads")
        loads = {}
        for point, comp_node in points_node.items():
            ploc = f"{loc}.point_loads.{point}"
            comp_map = _expect_mapping(comp_node, ploc)
            _expect_keys(
                comp_map,
                required=tuple(c.value for c in COMPONENT_ORDER),
                optional=(),
                location=ploc,
            )
            values = {
                c.value: _expect_number(comp_map[c.value], f"{ploc}.{c.value}")
                for c in COMPONENT_ORDER
            }
            try:
                loads[_expect_text(point, ploc)] = ComponentSet(**values)
            except ValueError as exc:
                raise SchemaError(str(exc), location=ploc) from exc
        try:
            cases.append(LoadCase(id=case_id, label=label, loads=loads))
        except ValueError as exc:
            raise SchemaError(str(exc), location=loc) from exc

    try:
        return LoadsDelivery(
            name=_expect_text(root["name"], "name"),
            version=_expect_int(root["version"], "version"),
            units=units,
            coordinate_system=coordinate_system,
            point_coordinates=point_coordinates,
            cases=tuple(cases),
        )
    except ValueError as exc:
        raise SchemaError(str(exc), location="$") from exc


def validate_delivery(delivery: LoadsDelivery) -> ValidationReport:
    """Run delivery-level consistency checks and collect findings.

    Errors: duplicate case ids, point sets differing between cases,
    coordinates not covering the point set. Warnings: non-SI units (a
    finding to surface, not a failure).
    """
    findings: list[Finding] = []

    seen: dict[int, int] = {}
    for idx, case in enumerate(delivery.cases):
        if case.id in seen:
            findings.append(
                Finding(
                    "error",
                    "DUPLICATE_CASE_ID",
                    f"case id {case.id} appears at load_cases[{seen[case.id]}] and load_cases[{idx}]",
                    f"load_cases[{idx}].id",
                )
            )
        else:
            seen[case.id] = idx

    reference = delivery.cases[0].point_names()
    for idx, case in enumerate(delivery.cases[1:], start=1):
        if case.point_names() != reference:
            missing = sorted(set(reference) - set(case.loads))
            extra = sorted(set(case.loads) - set(reference))
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"extra {extra}")
            findings.append(
                Finding(
                    "error",
                    "POINT_SET_MISMATCH",
                    f"case {case.id} point set differs from case {delivery.cases[0].id}: "
                    + "; ".join(detail),
                    f"load_cases[{idx}].point_loads",
                )
            )

    if delivery.point_coordinates is not None:
        coord_points = sorted(delivery.point_coordinates)
        case_points = point_names(delivery)
        if coord_points != case_points:
            findings.append(
                Finding(
                    "error",
                    "COORDINATE_COVERAGE",
                    f"point_coordinates keys {coord_points} do not match case points {case_points}",
                    "point_coordinates",
                )
            )

    if not delivery.units.is_si:
        findings.append(
            Finding(
                "warning",
                "NON_SI_UNITS",
                f"delivery units are {delivery.units.force_unit}/{delivery.units.moment_unit}; "
                "convert before FEM export",
                "units",
            )
        )

    return ValidationReport(tuple(findings))


def _delivery_to_plain(delivery: LoadsDelivery) -> dict:
    """Delivery as plain dicts in canonical key/point order."""
    out: dict = {
        "name": delivery.name,
        "version": delivery.version,
        "units": {"force": delivery.units.force_unit, "moment": delivery.units.moment_unit},
    }
    if delivery.coordinate_system is not None:
        out["coordinate_system"] = delivery.coordinate_system
    if delivery.point_coordinates is not None:
        out["point_coordinates"] = {
            point: list(delivery.point_coordinates[point])
            for point in sorted(delivery.point_coordinates)
        }
    out["load_cases"] = []
    for case in delivery.cases:
        case_out: dict = {"id": case.id}
        if case.label is not None:
            case_out["label"] = case.label
        case_out["point_loads"] = {
            point: {c.value: case.loads[point].value(c) for c in COMPONENT_ORDER}
            for point in sorted(case.loads)
        }
        out["load_cases"].append(case_out)
    return out


def write_delivery_json(delivery: LoadsDelivery) -> str:
    """Canonical JSON rendering: fixed key order, sorted points, LF, trailing newline."""
    return json.dumps(_delivery_to_plain(delivery), indent=2, ensure_ascii=False) + "\n"


def write_delivery_yaml(delivery: LoadsDelivery) -> str:
    """Deterministic YAML rendering of the same canonical structure."""
    return yaml.safe_dump(
        _delivery_to_plain(delivery),
        sort_keys=False,
        allow_unicode=True,
        default_flow_style=False,
    )


def load_delivery(path: str | Path) -> LoadsDelivery:
    """Read, parse and validate a delivery file; raise on error findings."""
    raw = Path(path).read_bytes()
    delivery = parse_delivery(raw)
    report = validate_delivery(delivery)
    if not report.ok:
        first = next(f for f in report.findings if f.severity == "error")
        raise LoadsmithError(
            f"invalid delivery {path}: {first.message}",
            code=first.code,
            location=first.location,
        )
    return delivery

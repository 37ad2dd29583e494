"""Deterministic exporters: ANSYS-style decks, envelope markdown, extremes JSON.

All emitted text is byte-reproducible: fixed orderings, fixed number
formats, LF line endings and no timestamps. Run provenance belongs in the
sidecar trace, never inside content files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import LoadsmithError, SchemaError
from .model import (
    COMPONENT_ORDER,
    Component,
    EnvelopeExtremes,
    ExtremeCell,
    LoadCase,
    LoadsDelivery,
    UnitSystem,
)

NodeMap = dict[str, int]

DECK_HEADER = "/COM, DUCTILE loadsmith"


def format_deck_value(value: float) -> str:
    """Upper-case scientific notation with six fractional digits."""
    return f"{value:.6E}"


def parse_node_map(text: str) -> NodeMap:
    """Parse a {point: node id} JSON config; ids must be positive and unique."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid node map JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaError("node map must be a JSON object of {point: node id}")
    nodes: NodeMap = {}
    for point, node in data.items():
        if isinstance(node, bool) or not isinstance(node, int) or node < 1:
            raise SchemaError(
                f"node id for {point!r} must be a positive integer, got {node!r}",
                location=point,
            )
        nodes[point] = node
    if len(set(nodes.values())) != len(nodes):
        raise SchemaError("node map assigns the same node id to two points")
    return nodes


def load_node_map(path: str | Path) -> NodeMap:
    return parse_node_map(Path(path).read_text(encoding="utf-8"))


def write_ansys_inp(
    case: LoadCase, nodes: NodeMap, exclude: set[str] | frozenset[str] = frozenset()
) -> str:
    """Render one load case as a nodal-force deck.

    Two comment lines, then one ``F,<node>,<LABEL>,<value>`` line per
    non-excluded point (lexicographic) and component (canonical order).
    The caller must have converted the delivery to the FEM unit system.

    Raises:
        LoadsmithError: For a non-excluded point with no node mapping, or
            when the exclusion leaves nothing to write.
    """
    points = [p for p in sorted(case.loads) if p not in exclude]
    if not points:
        raise LoadsmithError(
            f"case {case.id}: every point is excluded, refusing to write an empty deck",
            code="EMPTY_DECK",
        )
    unmapped = [p for p in points if p not in nodes]
    if unmapped:
        raise LoadsmithError(
            f"case {case.id}: no node mapping for points {unmapped}",
            code="UNMAPPED_POINT",
        )

    lines = [DECK_HEADER]
    title = f"/COM, case {case.id}"
    if case.label is not None:
        title += f" {case.label}"
    lines.append(title)
    for point in points:
        loads = case.loads[point]
        for comp in COMPONENT_ORDER:
            lines.append(
                f"F,{nodes[point]},{comp.name},{format_deck_value(loads.value(comp))}"
            )
    return "\n".join(lines) + "\n"


def export_all_inp(
    delivery: LoadsDelivery,
    selected: list[int],
    nodes: NodeMap,
    exclude: set[str] | frozenset[str] = frozenset(),
    out_dir: str | Path = ".",
) -> list[Path]:
    """Write ``limit_load_<id>.inp`` per selected case, ascending id order.

    Returns the paths written. Repeat runs on equal inputs are
    byte-identical.
    """
    if not selected:
        raise LoadsmithError("no cases selected for export", code="EMPTY_SELECTION")
    known = set(delivery.case_ids())
    unknown = sorted(set(selected) - known)
    if unknown:
        raise LoadsmithError(
            f"selected case ids not in delivery: {unknown}", code="UNKNOWN_CASE_ID"
        )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for case_id in sorted(set(selected)):
        deck = write_ansys_inp(delivery.case_by_id(case_id), nodes, exclude)
        path = out / f"limit_load_{case_id}.inp"
        path.write_text(deck, encoding="utf-8", newline="\n")
        paths.append(path)
    return paths


def envelope_to_markdown(extremes: EnvelopeExtremes) -> str:
    """One markdown table per point, values formatted as in the decks."""
    lines = [
        "# Envelope extremes",
        "",
        f"Delivery: {extremes.name} v{extremes.version}",
        f"Units: force {extremes.units.force_unit}, moment {extremes.units.moment_unit}",
    ]
    for point in extremes.points():
        lines.append("")
        lines.append(f"## {point}")
        lines.append("")
        lines.append("| Component | Max | Max case | Min | Min case |")
        lines.append("| --- | --- | --- | --- | --- |")
        for comp in COMPONENT_ORDER:
            cell = extremes.cell(point, comp)
            lines.append(
                f"| {comp.name} | {format_deck_value(cell.max_value)} | {cell.max_case}"
                f" | {format_deck_value(cell.min_value)} | {cell.min_case} |"
            )
    return "\n".join(lines) + "\n"


def write_envelope_json(extremes: EnvelopeExtremes) -> str:
    """Canonical extremes JSON: sorted points, canonical components, raw floats."""
    data = {
        "name": extremes.name,
        "version": extremes.version,
        "units": {
            "force": extremes.units.force_unit,
            "moment": extremes.units.moment_unit,
        },
        "extremes": {
            point: {
                comp.name: {
                    "max": extremes.cell(point, comp).max_value,
                    "max_case": extremes.cell(point, comp).max_case,
                    "min": extremes.cell(point, comp).min_value,
                    "min_case": extremes.cell(point, comp).min_case,
                }
                for comp in COMPONENT_ORDER
            }
            for point in extremes.points()
        },
    }
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def read_envelope_json(text: str) -> EnvelopeExtremes:
    """Inverse of write_envelope_json."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid envelope JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaError("envelope JSON must be an object")
    for key in ("name", "version", "units", "extremes"):
        if key not in data:
            raise SchemaError(f"envelope JSON missing field {key!r}", location=key)
    units = UnitSystem(data["units"]["force"], data["units"]["moment"])
    cells: dict[str, dict[Component, ExtremeCell]] = {}
    for point, per_comp in data["extremes"].items():
        cells[point] = {}
        for comp in COMPONENT_ORDER:
            if comp.name not in per_comp:
                raise SchemaError(
                    f"envelope JSON missing component {comp.name} at point {point!r}",
                    location=f"extremes.{point}.{comp.name}",
                )
            raw = per_comp[comp.name]
            cells[point][comp] = ExtremeCell(
                max_value=raw["max"],
                max_case=raw["max_case"],
                min_value=raw["min"],
                min_case=raw["min_case"],
            )
    return EnvelopeExtremes(
        name=data["name"], version=data["version"], units=units, cells=cells
    )

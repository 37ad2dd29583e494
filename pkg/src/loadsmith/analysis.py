"""Equilibrium verification and envelope downselection.

Envelope rule: per (point, component) the case holding the maximum is
always kept; the case holding the minimum is kept only when the minimum is
strictly negative. Ties resolve to the earliest case in delivery order so
that repeated runs select identical ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import LoadsmithError
from .model import (
    COMPONENT_ORDER,
    FORCE_COMPONENTS,
    MOMENT_COMPONENTS,
    Component,
    EnvelopeExtremes,
    ExtremeCell,
    LoadCase,
    LoadsDelivery,
    UnitSystem,
)

Coordinates = dict[str, tuple[float, float, float]]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair for residual checks."""

    abs: float = 1e-9
    rel: float = 1e-3

    def threshold(self, reference: float) -> float:
        return max(self.abs, self.rel * reference)


@dataclass(frozen=True)
class EquilibriumResult:
    case_id: int
    force_residual: tuple[float, float, float]
    force_residual_magnitude: float
    balanced: bool
    tolerance_used: Tolerance
    moment_residual: tuple[float, float, float] | None = None
    moment_residual_magnitude: float | None = None

    def to_dict(self) -> dict:
        out = {
            "case_id": self.case_id,
            "force_residual": list(self.force_residual),
            "force_residual_magnitude": self.force_residual_magnitude,
            "balanced": self.balanced,
            "tolerance": {"abs": self.tolerance_used.abs, "rel": self.tolerance_used.rel},
        }
        if self.moment_residual is not None:
            out["moment_residual"] = list(self.moment_residual)
            out["moment_residual_magnitude"] = self.moment_residual_magnitude
        return out


@dataclass(frozen=True)
class EquilibriumSurvey:
    results: tuple[EquilibriumResult, ...]

    @property
    def all_balanced(self) -> bool:
        return all(r.balanced for r in self.results)

    def to_dict(self) -> dict:
        return {
            "all_balanced": self.all_balanced,
            "cases": [r.to_dict() for r in self.results],
        }


def _cross(r: tuple[float, float, float], f: tuple[float, float, float]) -> tuple[float, float, float]:
    return (
        r[1] * f[2] - r[2] * f[1],
        r[2] * f[0] - r[0] * f[2],
        r[0] * f[1] - r[1] * f[0],
    )


def check_equilibrium(
    case: LoadCase,
    coords: Coordinates | None = None,
    tol: Tolerance = Tolerance(),
    units: UnitSystem | None = None,
) -> EquilibriumResult:
    """Sum forces (and, with coordinates, moments about the origin) for one case.

    The force residual is the componentwise sum over points. When ``coords``
    are given the moment residual is sum(M_i + r_i x F_i); that mixes meters
    with the load units, so it is refused unless ``units`` says the delivery
    is SI. Balanced means every computed residual magnitude is within
    max(abs_tol, rel_tol * L_ref) where L_ref is the largest single
    component magnitude of that kind in the case.

    Args:
        case: Load case to check.
        coords: Optional point -> (x, y, z) map in meters covering the case.
        tol: Absolute/relative tolerances.
        units: Delivery units, required non-None to enable the coords path.
    """
    if coords is not None:
        missing = sorted(set(case.loads) - set(coords))
        if missing:
            raise LoadsmithError(
                f"coordinates missing for points {missing}", code="COORDINATE_COVERAGE"
            )
        if units is not None and not units.is_si:
            raise LoadsmithError(
                "moment equilibrium with coordinates requires SI units "
                f"(got {units.force_unit}/{units.moment_unit}); convert first",
                code="NON_SI_EQUILIBRIUM",
            )

    points = sorted(case.loads)
    force_sum = [0.0, 0.0, 0.0]
    for point in points:
        cs = case.loads[point]
        force_sum[0] += cs.fx
        force_sum[1] += cs.fy
        force_sum[2] += cs.fz
    force_residual = tuple(force_sum)
    force_magnitude = math.sqrt(sum(v * v for v in force_residual))

    force_ref = max(
        (abs(case.loads[p].value(c)) for p in points for c in FORCE_COMPONENTS),
        default=0.0,
    )
    balanced = force_magnitude <= tol.threshold(force_ref)

    moment_residual = None
    moment_magnitude = None
    if coords is not None:
        moment_sum = [0.0, 0.0, 0.0]
        for point in points:
            cs = case.loads[point]
            mx, my, mz = cs.mx, cs.my, cs.mz
            rx_f = _cross(coords[point], (cs.fx, cs.fy, cs.fz))
            moment_sum[0] += mx + rx_f[0]
            moment_sum[1] += my + rx_f[1]
            moment_sum[2] += mz + rx_f[2]
        moment_residual = tuple(moment_sum)
        moment_magnitude = math.sqrt(sum(v * v for v in moment_residual))
        moment_ref = max(
            (abs(case.loads[p].value(c)) for p in points for c in MOMENT_COMPONENTS),
            default=0.0,
        )
        balanced = balanced and moment_magnitude <= tol.threshold(moment_ref)

    return EquilibriumResult(
        case_id=case.id,
        force_residual=force_residual,
        force_residual_magnitude=force_magnitude,
        moment_residual=moment_residual,
        moment_residual_magnitude=moment_magnitude,
        balanced=balanced,
        tolerance_used=tol,
    )


def check_equilibrium_all(
    delivery: LoadsDelivery,
    tol: Tolerance = Tolerance(),
    coords: Coordinates | None = None,
) -> EquilibriumSurvey:
    """Check every case in delivery order.

    Uses the delivery's own point coordinates when none are passed; the
    moment path is only taken when coordinates exist.
    """
    if coords is None:
        coords = delivery.point_coordinates
    results = tuple(
        check_equilibrium(case, coords=coords, tol=tol, units=delivery.units)
        for case in delivery.cases
    )
    return EquilibriumSurvey(results)


@dataclass(frozen=True)
class SelectionReason:
    point: str
    component: Component
    kind: str  # "max" | "min"


@dataclass(frozen=True)
class EnvelopeSelection:
    selected_case_ids: tuple[int, ...]
    extremes: EnvelopeExtremes
    reasons: dict[int, tuple[SelectionReason, ...]] = field(default_factory=dict)


def envelope_extremes(delivery: LoadsDelivery) -> EnvelopeExtremes:
    """Max/min value and originating case per (point, component).

    Strict comparisons keep the earliest case in delivery order on ties.
    """
    cells: dict[str, dict[Component, ExtremeCell]] = {}
    point_set: set[str] = set()
    for case in delivery.cases:
        point_set.update(case.loads)

    for point in sorted(point_set):
        per_comp: dict[Component, ExtremeCell] = {}
        for comp in COMPONENT_ORDER:
            max_value = max_case = min_value = min_case = None
            for case in delivery.cases:
                if point not in case.loads:
                    continue
                value = case.loads[point].value(comp)
                if max_value is None or value > max_value:
                    max_value, max_case = value, case.id
                if min_value is None or value < min_value:
                    min_value, min_case = value, case.id
            per_comp[comp] = ExtremeCell(
                max_value=max_value, max_case=max_case, min_value=min_value, min_case=min_case
            )
        cells[point] = per_comp

    return EnvelopeExtremes(
        name=delivery.name, version=delivery.version, units=delivery.units, cells=cells
    )


def envelope_select(delivery: LoadsDelivery) -> EnvelopeSelection:
    """Downselect to the critical cases per the envelope rule.

    Selected set = every max case id, plus min case ids whose minimum is
    strictly negative; ids are reported in ascending order with the
    (point, component, max|min) reasons that caused each selection.
    """
    extremes = envelope_extremes(delivery)
    reasons: dict[int, list[SelectionReason]] = {}
    for point in extremes.points():
        for comp in COMPONENT_ORDER:
            cell = extremes.cell(point, comp)
            reasons.setdefault(cell.max_case, []).append(SelectionReason(point, comp, "max"))
            if cell.min_value < 0.0:
                reasons.setdefault(cell.min_case, []).append(
                    SelectionReason(point, comp, "min")
                )
    selected = tuple(sorted(reasons))
    return EnvelopeSelection(
        selected_case_ids=selected,
        extremes=extremes,
        reasons={cid: tuple(rs) for cid, rs in reasons.items()},
    )

"""Core domain model: load components, cases, deliveries and envelope extremes.

Everything here is an immutable value object. Constructors reject locally
invalid data (non-finite numbers, bad ids, unrecognized units); consistency
rules that span several cases of one delivery (unique ids, identical point
sets) are checked by :func:`loadsmith.ingest.validate_delivery` so that a
broken delivery can still be loaded and reported on.

Deterministic ordering rules live here and are shared by every exporter:
points sort lexicographically, components follow the canonical FX, FY, FZ,
MX, MY, MZ order, and cases keep their delivery order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import UnknownUnitError

FORCE_UNITS = ("N", "kN", "lbf", "klbf")
MOMENT_UNITS = ("N·m", "kN·m", "lbf·in", "klbf·in")

# Closed alias table. "klbs"/"klbs.in" are spellings seen in OEM deliveries;
# the ASCII-dot and bare forms exist so the tokens can be typed on any shell.
# Unknown strings are errors, never guesses.
UNIT_ALIASES = {
    "klbs": "klbf",
    "klbs.in": "klbf·in",
    "N.m": "N·m",
    "Nm": "N·m",
    "kN.m": "kN·m",
    "kNm": "kN·m",
    "lbf.in": "lbf·in",
    "klbf.in": "klbf·in",
}


def canonical_unit(token: str, kind: str) -> str:
    """Normalize a unit token, resolving aliases.

    Args:
        token: Unit string as found in an input file.
        kind: "force" or "moment".

    Raises:
        UnknownUnitError: If the token is not a recognized unit or alias.
    """
    resolved = UNIT_ALIASES.get(token, token)
    allowed = FORCE_UNITS if kind == "force" else MOMENT_UNITS
    if resolved not in allowed:
        raise UnknownUnitError(
            f"unknown {kind} unit {token!r}; recognized: {', '.join(allowed)}",
            location=f"units.{kind}",
        )
    return resolved


class Component(enum.Enum):
    """One of the six load components at an interface point.

    The enum order FX < FY < FZ < MX < MY < MZ is the canonical output
    ordering used by every exporter.
    """

    FX = "fx"
    FY = "fy"
    FZ = "fz"
    MX = "mx"
    MY = "my"
    MZ = "mz"

    @property
    def is_force(self) -> bool:
        return self in (Component.FX, Component.FY, Component.FZ)

    @property
    def is_moment(self) -> bool:
        return not self.is_force

    def __lt__(self, other: "Component") -> bool:
        if not isinstance(other, Component):
            return NotImplemented
        return COMPONENT_ORDER.index(self) < COMPONENT_ORDER.index(other)


COMPONENT_ORDER = (
    Component.FX,
    Component.FY,
    Component.FZ,
    Component.MX,
    Component.MY,
    Component.MZ,
)

FORCE_COMPONENTS = (Component.FX, Component.FY, Component.FZ)
MOMENT_COMPONENTS = (Component.MX, Component.MY, Component.MZ)


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ComponentSet:
    """The six load components at one point: three forces, three moments."""

    fx: float = 0.0
    fy: float = 0.0
    fz: float = 0.0
    mx: float = 0.0
    my: float = 0.0
    mz: float = 0.0

    def __post_init__(self):
        for comp in COMPONENT_ORDER:
            object.__setattr__(self, comp.value, _require_finite(comp.value, getattr(self, comp.value)))

    def value(self, component: Component) -> float:
        return getattr(self, component.value)

    def scaled(self, factors: dict[Component, float]) -> "ComponentSet":
        """Return a copy with each component multiplied by its factor (default 1)."""
        return ComponentSet(
            **{c.value: self.value(c) * factors.get(c, 1.0) for c in COMPONENT_ORDER}
        )


def component_value(loads: ComponentSet, component: Component) -> float:
    """Project the named component out of a component set."""
    return loads.value(component)


@dataclass(frozen=True)
class UnitSystem:
    """Force/moment unit pair of a delivery."""

    force_unit: str = "N"
    moment_unit: str = "N·m"

    def __post_init__(self):
        object.__setattr__(self, "force_unit", canonical_unit(self.force_unit, "force"))
        object.__setattr__(self, "moment_unit", canonical_unit(self.moment_unit, "moment"))

    @property
    def is_si(self) -> bool:
        return self.force_unit == "N" and self.moment_unit == "N·m"


SI_UNITS = UnitSystem("N", "N·m")


@dataclass(frozen=True)
class LoadCase:
    """One load condition: a component set per interface point.

    Ids must be positive; uniqueness across a delivery is a delivery-level
    rule checked by validate_delivery.
    """

    id: int
    loads: dict[str, ComponentSet]
    label: str | None = None

    def __post_init__(self):
        if not isinstance(self.id, int) or isinstance(self.id, bool) or self.id < 1:
            raise ValueError(f"case id must be a positive integer, got {self.id!r}")
        if not self.loads:
            raise ValueError(f"case {self.id} has no point loads")
        object.__setattr__(self, "loads", dict(self.loads))

    def point_names(self) -> list[str]:
        return sorted(self.loads)


@dataclass(frozen=True)
class LoadsDelivery:
    """An OEM load delivery: ordered cases over a fixed set of points.

    ``point_coordinates``, when present, are (x, y, z) in meters and must
    cover exactly the case point set (checked by validate_delivery).
    """

    name: str
    version: int
    units: UnitSystem
    cases: tuple[LoadCase, ...]
    coordinate_system: str | None = None
    point_coordinates: dict[str, tuple[float, float, float]] | None = None

    def __post_init__(self):
        if not isinstance(self.version, int) or isinstance(self.version, bool) or self.version < 1:
            raise ValueError(f"delivery version must be a positive integer, got {self.version!r}")
        object.__setattr__(self, "cases", tuple(self.cases))
        if not self.cases:
            raise ValueError("delivery must contain at least one load case")
        if self.point_coordinates is not None:
            coords = {
                name: tuple(_require_finite(f"{name}[{i}]", v) for i, v in enumerate(xyz))
                for name, xyz in self.point_coordinates.items()
            }
            for name, xyz in coords.items():
                if len(xyz) != 3:
                    raise ValueError(f"coordinates for {name!r} must have 3 entries")
            object.__setattr__(self, "point_coordinates", coords)

    def case_ids(self) -> list[int]:
        return [c.id for c in self.cases]

    def case_by_id(self, case_id: int) -> LoadCase:
        for case in self.cases:
            if case.id == case_id:
                return case
        raise KeyError(f"no case with id {case_id}")


def point_names(delivery: LoadsDelivery) -> list[str]:
    """Lexicographically sorted union of point names over all cases."""
    names: set[str] = set()
    for case in delivery.cases:
        names.update(case.loads)
    return sorted(names)


@dataclass(frozen=True)
class ExtremeCell:
    """Max/min values of one (point, component) pair with originating cases."""

    max_value: float
    max_case: int
    min_value: float
    min_case: int

    def __post_init__(self):
        _require_finite("max_value", self.max_value)
        _require_finite("min_value", self.min_value)
        if self.min_value > self.max_value:
            raise ValueError(
                f"min_value {self.min_value} exceeds max_value {self.max_value}"
            )


@dataclass(frozen=True)
class EnvelopeExtremes:
    """Per-(point, component) extremes table with delivery provenance."""

    name: str
    version: int
    units: UnitSystem
    cells: dict[str, dict[Component, ExtremeCell]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "cells", {p: dict(per_comp) for p, per_comp in self.cells.items()}
        )

    def points(self) -> list[str]:
        return sorted(self.cells)

    def cell(self, point: str, component: Component) -> ExtremeCell:
        return self.cells[point][component]

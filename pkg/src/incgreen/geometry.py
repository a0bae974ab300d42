"""Geometry of a disk-shaped body containing small circular inclusions.

All lengths are in metres, shear moduli in Pa.  The inclusion radii stored
on a Scenario are reference radii; the physical radius of inclusion j is
epsilon * a_j, so shrinking the whole family is a single scalar update.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

# relative tolerance for boundary / interface classification
GEOM_TOL_FACTOR = 1e-9
DEFAULT_CLEARANCE_FACTOR = 0.1


class DomainError(ValueError):
    """A point or source violates a domain precondition."""


class OutOfDomainError(DomainError):
    pass


class SingularEvaluationError(DomainError):
    pass


class DegenerateSourceError(DomainError):
    pass


class InterfaceProximityError(DomainError):
    pass


class ScenarioFormatError(ValueError):
    """A scenario description file is malformed."""


@dataclass(frozen=True)
class Material:
    shear_modulus: float  # Pa


@dataclass(frozen=True)
class Inclusion:
    center: tuple[float, float]
    radius: float  # reference radius a_j; physical radius is epsilon * a_j
    material: Material


@dataclass(frozen=True)
class Scenario:
    outer_radius: float
    matrix: Material
    inclusions: tuple[Inclusion, ...]
    epsilon: float = 1.0

    @property
    def geom_tol(self) -> float:
        return GEOM_TOL_FACTOR * self.outer_radius

    def physical_radius(self, j: int) -> float:
        return self.epsilon * self.inclusions[j].radius

    def physical_radii(self) -> list[float]:
        return [self.epsilon * inc.radius for inc in self.inclusions]


class RegionKind(Enum):
    MATRIX = "matrix"
    INCLUSION = "inclusion"
    OUTER_BOUNDARY = "outer_boundary"
    INTERFACE = "interface"


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    index: int | None = None  # inclusion index for INCLUSION / INTERFACE

    def label(self) -> str:
        if self.index is None:
            return self.kind.value
        return f"{self.kind.value}_{self.index}"


MATRIX = Region(RegionKind.MATRIX)
OUTER_BOUNDARY = Region(RegionKind.OUTER_BOUNDARY)


def classify_point(scenario: Scenario, x: tuple[float, float]) -> Region:
    """Locate x within the composite body.

    Interface and outer-boundary bands have half-width geom_tol; anything
    farther than geom_tol outside the disk is rejected.
    """
    tol = scenario.geom_tol
    r = math.hypot(x[0], x[1])
    if r > scenario.outer_radius + tol:
        raise OutOfDomainError(
            f"point ({x[0]}, {x[1]}) lies outside the disk of radius "
            f"{scenario.outer_radius}"
        )
    if abs(r - scenario.outer_radius) <= tol:
        return OUTER_BOUNDARY
    for j, inc in enumerate(scenario.inclusions):
        d = math.hypot(x[0] - inc.center[0], x[1] - inc.center[1])
        rho = scenario.epsilon * inc.radius
        if abs(d - rho) <= tol:
            return Region(RegionKind.INTERFACE, j)
        if d < rho:
            return Region(RegionKind.INCLUSION, j)
    return MATRIX


def validate(scenario: Scenario,
             clearance_factor: float = DEFAULT_CLEARANCE_FACTOR) -> list[str]:
    """Check scenario invariants; returns human-readable violations.

    Inclusions must be mutually disjoint and strictly inside the disk with
    clearance at least clearance_factor times the largest physical radius.
    Never raises: an invalid scenario is a reportable condition.
    """
    problems: list[str] = []
    if scenario.outer_radius <= 0:
        problems.append(f"outer radius {scenario.outer_radius} is not positive")
    if scenario.matrix.shear_modulus <= 0:
        problems.append(
            f"matrix shear modulus {scenario.matrix.shear_modulus} is not positive")
    if scenario.epsilon <= 0:
        problems.append(f"epsilon {scenario.epsilon} is not positive")
    radii = []
    for j, inc in enumerate(scenario.inclusions):
        if inc.radius <= 0:
            problems.append(f"inclusion {j}: radius {inc.radius} is not positive")
        else:
            radii.append(scenario.epsilon * inc.radius)
        if inc.material.shear_modulus <= 0:
            problems.append(
                f"inclusion {j}: shear modulus {inc.material.shear_modulus} "
                "is not positive")
    if problems:
        return problems  # size checks below assume positive radii

    clearance = clearance_factor * max(radii, default=0.0)
    for j, inc in enumerate(scenario.inclusions):
        rho = scenario.epsilon * inc.radius
        reach = math.hypot(*inc.center) + rho
        if reach > scenario.outer_radius - clearance:
            problems.append(
                f"inclusion {j}: reaches {reach:.6g} from the origin, leaving "
                f"less than the required clearance {clearance:.6g} to the "
                "outer boundary")
    for j in range(len(scenario.inclusions)):
        for k in range(j + 1, len(scenario.inclusions)):
            a, b = scenario.inclusions[j], scenario.inclusions[k]
            gap = (math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
                   - scenario.epsilon * (a.radius + b.radius))
            if gap < clearance:
                problems.append(
                    f"inclusions {j} and {k}: gap {gap:.6g} is below the "
                    f"required clearance {clearance:.6g}")
    return problems


def scale_family(scenario: Scenario, s: float) -> Scenario:
    """Shrink (or grow) every inclusion about its own center by factor s."""
    if s <= 0:
        raise ValueError(f"scale factor must be positive, got {s}")
    return replace(scenario, epsilon=s * scenario.epsilon)


# --- scenario files ---------------------------------------------------------

_SCENARIO_KEYS = {"outer_radius_m", "matrix_shear_modulus_Pa", "epsilon",
                  "inclusions"}
_INCLUSION_KEYS = {"center_m", "radius_m", "shear_modulus_Pa"}


def _require_number(obj, key, where):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioFormatError(f"{where}: '{key}' must be a number, got {v!r}")
    return float(v)


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioFormatError("scenario description must be a JSON object")
    unknown = set(data) - _SCENARIO_KEYS
    if unknown:
        raise ScenarioFormatError(f"unknown scenario keys: {sorted(unknown)}")
    missing = (_SCENARIO_KEYS - {"epsilon"}) - set(data)
    if missing:
        raise ScenarioFormatError(f"missing scenario keys: {sorted(missing)}")

    incs = data["inclusions"]
    if not isinstance(incs, list):
        raise ScenarioFormatError("'inclusions' must be a list")
    inclusions = []
    for j, raw in enumerate(incs):
        where = f"inclusion {j}"
        if not isinstance(raw, dict):
            raise ScenarioFormatError(f"{where}: must be an object")
        unknown = set(raw) - _INCLUSION_KEYS
        if unknown:
            raise ScenarioFormatError(f"{where}: unknown keys {sorted(unknown)}")
        missing = _INCLUSION_KEYS - set(raw)
        if missing:
            raise ScenarioFormatError(f"{where}: missing keys {sorted(missing)}")
        center = raw["center_m"]
        if (not isinstance(center, list) or len(center) != 2
                or any(isinstance(c, bool) or not isinstance(c, (int, float))
                       for c in center)):
            raise ScenarioFormatError(f"{where}: 'center_m' must be [x, y]")
        inclusions.append(Inclusion(
            center=(float(center[0]), float(center[1])),
            radius=_require_number(raw, "radius_m", where),
            material=Material(_require_number(raw, "shear_modulus_Pa", where)),
        ))

    epsilon = 1.0
    if "epsilon" in data:
        epsilon = _require_number(data, "epsilon", "scenario")
    return Scenario(
        outer_radius=_require_number(data, "outer_radius_m", "scenario"),
        matrix=Material(_require_number(data, "matrix_shear_modulus_Pa",
                                        "scenario")),
        inclusions=tuple(inclusions),
        epsilon=epsilon,
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioFormatError(f"cannot read scenario file {path}: {exc}") from exc
    return scenario_from_dict(data)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "outer_radius_m": scenario.outer_radius,
        "matrix_shear_modulus_Pa": scenario.matrix.shear_modulus,
        "epsilon": scenario.epsilon,
        "inclusions": [
            {"center_m": [inc.center[0], inc.center[1]],
             "radius_m": inc.radius,
             "shear_modulus_Pa": inc.material.shear_modulus}
            for inc in scenario.inclusions
        ],
    }

"""Value types for the delta mechanism: link sizing, joint space, task space.

All lengths are millimetres, all angles radians.  The base frame sits at the
centroid of the fixed triangle with z pointing up, so every working pose has
z < 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

_SQRT3 = math.sqrt(3.0)

# Canonical joint range: theta = 0 puts the upper arm horizontal, positive
# theta swings the knee below the base plane.
THETA_MIN = -math.pi / 2.0
THETA_MAX = math.pi


@dataclass(frozen=True, slots=True)
class RobotGeometry:
    """Link sizing of a translational delta robot.

    f: side length of the fixed base triangle
    e: side length of the moving effector triangle
    r_f: actuated upper-arm length
    r_e: parallelogram forearm length
    """

    f: float
    e: float
    r_f: float
    r_e: float

    def __post_init__(self):
        for name in ("f", "e", "r_f", "r_e"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{name} must be a number, got {value!r}")
            value = float(value)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be a positive finite length, got {value!r}")
            object.__setattr__(self, name, value)
        reach = abs(self.a + self.r_f - self.b)
        if not self.r_e > reach:
            raise ValueError(
                "home-pose assembly requires r_e > |a + r_f - b| "
                f"(r_e={self.r_e}, |a + r_f - b|={reach})"
            )

    @property
    def a(self) -> float:
        """Base offset: centroid to side midpoint of the fixed triangle."""
        return self.f / (2.0 * _SQRT3)

    @property
    def b(self) -> float:
        """Effector offset: centroid to side midpoint of the moving triangle."""
        return self.e / (2.0 * _SQRT3)

    def home_z(self) -> float:
        """Effector height with all arms horizontal (theta = 0)."""
        reach = self.a + self.r_f - self.b
        return -math.sqrt(self.r_e * self.r_e - reach * reach)

    def to_dict(self) -> dict:
        return {"f": self.f, "e": self.e, "rf": self.r_f, "re": self.r_e}


@dataclass(frozen=True, slots=True)
class Pose:
    """Cartesian effector position in the base frame, mm."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{name} must be a number, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True, slots=True)
class JointAngles:
    """Actuated joint angles, radians, one per arm in arm order."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{name} must be a number, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            if not (THETA_MIN < value < THETA_MAX):
                raise ValueError(
                    f"{name}={value} outside canonical joint range (-pi/2, pi)"
                )
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


@dataclass(frozen=True, slots=True)
class ArmSolution:
    """Per-arm inverse kinematics result in the arm's own working plane.

    knee is the (y, z) position of the elbow joint in the arm frame, where
    the pivot sits at (-a, 0).
    """

    arm_index: int
    theta: float
    knee: tuple[float, float]


def load_geometry(path: str | Path) -> RobotGeometry:
    """Read a geometry JSON file with keys f, e, rf, re (mm)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"geometry file {path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"geometry file {path}: expected a JSON object")
    missing = [key for key in ("f", "e", "rf", "re") if key not in raw]
    if missing:
        raise ValueError(f"geometry file {path}: missing key(s) {', '.join(missing)}")
    return RobotGeometry(f=raw["f"], e=raw["e"], r_f=raw["rf"], r_e=raw["re"])


def save_geometry(geometry: RobotGeometry, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(geometry.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

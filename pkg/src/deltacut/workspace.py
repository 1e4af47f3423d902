"""Reachable-workspace scans: dense boolean grids and point-set coverage.

Reachability is always an exact per-point test; a grid only decides where
the test runs (cell centres).  The vectorised mask below repeats the scalar
solver's decision arithmetic op for op, so grid scans, coverage fractions
and kinematics.is_reachable can never disagree on a point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CellBudgetExceeded
from .geometry import RobotGeometry
from .kinematics import ARM_COS, ARM_SIN, DISC_TOL_FRAC

CELL_BUDGET = 100_000_000

_GRID_MAGIC = "deltacut-grid"
_GRID_VERSION = 1


@dataclass(frozen=True, slots=True)
class GridSpec:
    """Axis-aligned scan box and cubic cell size, mm.

    Each axis is split into ceil(span / resolution) cells starting at the
    lower bound; flags are evaluated at cell centres.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float
    resolution: float

    def __post_init__(self):
        for name in ("x_min", "x_max", "y_min", "y_max", "z_min", "z_max", "resolution"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{name} must be a number, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if not self.resolution > 0.0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        for axis in ("x", "y", "z"):
            lo = getattr(self, f"{axis}_min")
            hi = getattr(self, f"{axis}_max")
            if not hi > lo:
                raise ValueError(f"{axis}_max must exceed {axis}_min ({lo} .. {hi})")
        nx, ny, nz = self.dims
        if nx * ny * nz > CELL_BUDGET:
            raise CellBudgetExceeded(
                f"grid would hold {nx * ny * nz} cells, budget is {CELL_BUDGET}"
            )

    @property
    def dims(self) -> tuple[int, int, int]:
        """Cell counts (nx, ny, nz)."""
        counts = []
        for axis in ("x", "y", "z"):
            lo = getattr(self, f"{axis}_min")
            hi = getattr(self, f"{axis}_max")
            counts.append(max(1, math.ceil((hi - lo) / self.resolution)))
        return tuple(counts)

    def axis_centers(self, axis: str) -> np.ndarray:
        lo = getattr(self, f"{axis}_min")
        n = self.dims[("x", "y", "z").index(axis)]
        return lo + (np.arange(n, dtype=np.float64) + 0.5) * self.resolution

    def cell_center(self, ix: int, iy: int, iz: int) -> tuple[float, float, float]:
        return (
            self.x_min + (ix + 0.5) * self.resolution,
            self.y_min + (iy + 0.5) * self.resolution,
            self.z_min + (iz + 0.5) * self.resolution,
        )

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min, "x_max": self.x_max,
            "y_min": self.y_min, "y_max": self.y_max,
            "z_min": self.z_min, "z_max": self.z_max,
            "resolution": self.resolution,
        }


@dataclass(frozen=True, slots=True, eq=False)
class WorkspaceGrid:
    """Dense occupancy flags over a GridSpec, indexed [iz, iy, ix]."""

    spec: GridSpec
    occupancy: np.ndarray

    def __post_init__(self):
        nx, ny, nz = self.spec.dims
        if self.occupancy.shape != (nz, ny, nx) or self.occupancy.dtype != np.bool_:
            raise ValueError(
                f"occupancy must be bool with shape {(nz, ny, nx)}, "
                f"got {self.occupancy.dtype} {self.occupancy.shape}"
            )
        self.occupancy.setflags(write=False)

    @property
    def occupied_count(self) -> int:
        return int(self.occupancy.sum())

    def flat(self) -> np.ndarray:
        """Row-major flattening: x fastest, z slowest."""
        return self.occupancy.reshape(-1)


@dataclass(frozen=True, slots=True, eq=False)
class PrescribedWorkspace:
    """A finite set of poses the mechanism is required to reach."""

    points: np.ndarray = field()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty (n, 3) array")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def _reachable_mask(geometry: RobotGeometry, x, y, z) -> np.ndarray:
    """Vector twin of kinematics._solve_arm_yz's decision arithmetic.

    Must stay op for op in lockstep with the scalar solver; only +, -, *, /,
    sqrt and comparisons appear on the decision path, so identical order
    gives bit-identical verdicts.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    a = geometry.a
    b = geometry.b
    r_f = geometry.r_f
    r_e = geometry.r_e
    tol = DISC_TOL_FRAC * (r_e * r_e)

    ok = np.ones(x.shape, dtype=bool)
    for c, s in zip(ARM_COS, ARM_SIN):
        xp = x * c - y * s
        yp = x * s + y * c

        rc2 = r_e * r_e - xp * xp
        arm_ok = rc2 >= -tol
        rc2 = np.where(rc2 < 0.0, 0.0, rc2)

        ey = yp - b
        dy = ey + a
        dz = z
        d2 = dy * dy + dz * dz
        arm_ok &= d2 > 0.0
        d = np.sqrt(np.where(d2 > 0.0, d2, 1.0))

        t = (d2 + r_f * r_f - rc2) / (2.0 * d)
        h2 = r_f * r_f - t * t
        arm_ok &= h2 >= -tol
        h2 = np.where(h2 < 0.0, 0.0, h2)
        h = np.sqrt(h2)

        uy = dy / d
        uz = dz / d
        ky = -a + t * uy
        kz = t * uz
        oy = -(h * uz)
        oz = h * uy

        take_a = (oy < 0.0) | ((oy == 0.0) & (oz <= 0.0))
        yj = np.where(take_a, ky + oy, ky - oy)
        zj = np.where(take_a, kz + oz, kz - oz)

        sin_c = -zj
        cos_c = -(yj + a)
        bad = ((sin_c < 0.0) & (cos_c <= 0.0)) | ((sin_c == 0.0) & (cos_c < 0.0))
        ok &= arm_ok & ~bad
    return ok


def compute_workspace(geometry: RobotGeometry, spec: GridSpec) -> WorkspaceGrid:
    """Scan the grid; each flag is the exact reachability of the cell centre."""
    nx, ny, nz = spec.dims
    xs = spec.axis_centers("x")
    ys = spec.axis_centers("y")
    zs = spec.axis_centers("z")
    zz, yy, xx = np.meshgrid(zs, ys, xs, indexing="ij")
    mask = _reachable_mask(geometry, xx.reshape(-1), yy.reshape(-1), zz.reshape(-1))
    return WorkspaceGrid(spec=spec, occupancy=mask.reshape(nz, ny, nx))


def coverage(geometry: RobotGeometry, prescribed: PrescribedWorkspace) -> float:
    """Fraction of prescribed points reachable, each tested exactly."""
    pts = prescribed.points
    mask = _reachable_mask(geometry, pts[:, 0], pts[:, 1], pts[:, 2])
    return float(mask.sum()) / float(len(prescribed))


def volume_estimate(grid: WorkspaceGrid) -> float:
    """Occupied cell count times the cell volume, mm^3."""
    r = grid.spec.resolution
    return grid.occupied_count * (r * r * r)


def default_grid_spec(geometry: RobotGeometry, resolution: float = 10.0) -> GridSpec:
    """Bounding box that provably contains the workspace.

    Horizontal radius a + r_f + r_e; z from -(r_f + r_e) up to the base
    plane.
    """
    radius = geometry.a + geometry.r_f + geometry.r_e
    depth = geometry.r_f + geometry.r_e
    return GridSpec(
        x_min=-radius, x_max=radius,
        y_min=-radius, y_max=radius,
        z_min=-depth, z_max=0.0,
        resolution=resolution,
    )


def dump_grid(grid: WorkspaceGrid, path: str | Path, geometry: RobotGeometry | None = None) -> None:
    """Write the grid as a text file: one JSON header line, then one line of
    '0'/'1' flags per (z, y) row, x fastest.  Byte-exact across platforms."""
    nx, ny, nz = grid.spec.dims
    header = {
        "format": _GRID_MAGIC,
        "version": _GRID_VERSION,
        "bounds": grid.spec.to_dict(),
        "dims": [nx, ny, nz],
        "order": "x fastest, then y, then z",
    }
    if geometry is not None:
        header["geometry"] = geometry.to_dict()
    digits = np.where(grid.occupancy, "1", "0")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")))
        fh.write("\n")
        for iz in range(nz):
            for iy in range(ny):
                fh.write("".join(digits[iz, iy]))
                fh.write("\n")


def load_grid(path: str | Path) -> WorkspaceGrid:
    """Read a grid written by dump_grid."""
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"grid file {path}: bad header ({exc})") from exc
        if header.get("format") != _GRID_MAGIC or header.get("version") != _GRID_VERSION:
            raise ValueError(f"grid file {path}: unrecognised format header")
        spec = GridSpec(**header["bounds"])
        nx, ny, nz = spec.dims
        if header.get("dims") != [nx, ny, nz]:
            raise ValueError(f"grid file {path}: dims do not match bounds/resolution")
        rows = []
        for iz in range(nz):
            for iy in range(ny):
                line = fh.readline().rstrip("\n")
                if len(line) != nx or set(line) - {"0", "1"}:
                    raise ValueError(f"grid file {path}: bad row at z={iz} y={iy}")
                rows.append([ch == "1" for ch in line])
    occupancy = np.array(rows, dtype=bool).reshape(nz, ny, nx)
    return WorkspaceGrid(spec=spec, occupancy=occupancy)


def load_prescribed(path: str | Path) -> PrescribedWorkspace:
    """Read a prescribed-workspace JSON file: a list of [x, y, z] triples."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"prescribed file {path}: invalid JSON ({exc})") from exc
    if isinstance(raw, dict) and "points" in raw:
        raw = raw["points"]
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"prescribed file {path}: expected a non-empty list of points")
    for i, item in enumerate(raw):
        if not (isinstance(item, list) and len(item) == 3):
            raise ValueError(f"prescribed file {path}: point {i} is not an [x, y, z] triple")
    return PrescribedWorkspace(points=np.array(raw, dtype=np.float64))


def save_prescribed(prescribed: PrescribedWorkspace, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump([[float(v) for v in row] for row in prescribed.points], fh)
        fh.write("\n")


def is_reachable_many(geometry: RobotGeometry, points: np.ndarray) -> np.ndarray:
    """Exact reachability for an (n, 3) array of poses."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be an (n, 3) array")
    return _reachable_mask(geometry, pts[:, 0], pts[:, 1], pts[:, 2])

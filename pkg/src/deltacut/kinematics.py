"""Closed-form inverse and forward kinematics of the translational delta.

Arm i (1..3) works in a frame rotated by -(i-1)*120 degrees about z.  In that
frame the actuated pivot sits at (y, z) = (-a, 0), the upper arm swings in
the x = 0 plane, and the platform joint for the arm is the pose shifted by
-b along y.  Inverse kinematics intersects the forearm sphere with the arm
plane, then intersects the resulting circle with the knee circle and keeps
the knee with the smaller y (elbow out).  Forward kinematics intersects the
three forearm spheres after shifting their centres to the platform centroid.

The accept/reject arithmetic in _solve_arm_yz is mirrored op for op by the
vectorised mask in workspace.py.  Keep the two in lockstep: only +, -, *, /,
sqrt and comparisons are used on the decision path, so identical operation
order guarantees bit-identical verdicts between scalar and array scans.
"""

from __future__ import annotations

import math

from .errors import NoSolution, Singular, Unreachable
from .geometry import ArmSolution, JointAngles, Pose, RobotGeometry, THETA_MAX, THETA_MIN

_SQRT3_2 = math.sqrt(3.0) / 2.0

# World-to-arm-frame rotation (cos, sin) per arm, angles -(i-1)*120 degrees.
ARM_COS = (1.0, -0.5, -0.5)
ARM_SIN = (0.0, -_SQRT3_2, _SQRT3_2)

# Discriminants within [-tol, 0] count as tangent so boundary poses do not
# fail on rounding noise; tol scales with the squared forearm length.
DISC_TOL_FRAC = 1e-12

# Relative rank tolerance for the forward-kinematics plane system.
RANK_TOL = 1e-12


def _solve_arm_yz(
    a: float, b: float, r_f: float, r_e: float,
    xp: float, yp: float, zp: float, arm_index: int,
) -> tuple[float, float, float]:
    """Solve one arm in its own frame; returns (theta, knee_y, knee_z).

    Mirrored by workspace._reachable_mask; change both together.
    """
    tol = DISC_TOL_FRAC * (r_e * r_e)

    # Forearm sphere cut by the arm plane x = 0: a circle of squared radius
    # rc2 about the projected platform joint.
    rc2 = r_e * r_e - xp * xp
    if rc2 < -tol:
        raise Unreachable(arm_index, "forearm sphere does not reach the arm plane")
    if rc2 < 0.0:
        rc2 = 0.0

    # Circle 1: pivot (-a, 0), radius r_f.  Circle 2: (yp - b, zp), radius
    # sqrt(rc2).  dy, dz point from the pivot to the platform joint.
    ey = yp - b
    dy = ey + a
    dz = zp
    d2 = dy * dy + dz * dz
    if d2 <= 0.0:
        raise Unreachable(arm_index, "platform joint coincides with the arm pivot")
    d = math.sqrt(d2)

    # Distance from the pivot to the chord along the centre line, and the
    # half-chord length.
    t = (d2 + r_f * r_f - rc2) / (2.0 * d)
    h2 = r_f * r_f - t * t
    if h2 < -tol:
        raise Unreachable(arm_index, "knee circle does not meet the forearm circle")
    if h2 < 0.0:
        h2 = 0.0
    h = math.sqrt(h2)

    uy = dy / d
    uz = dz / d
    ky = -a + t * uy
    kz = t * uz
    oy = -(h * uz)
    oz = h * uy

    # Elbow-out branch: smaller knee y; on a y tie prefer the lower knee.
    if oy < 0.0 or (oy == 0.0 and oz <= 0.0):
        yj = ky + oy
        zj = kz + oz
    else:
        yj = ky - oy
        zj = kz - oz

    # theta measured from the horizontal, positive knee-down; the upper arm
    # points from the pivot to the knee along (-cos, -sin).
    sin_c = -zj
    cos_c = -(yj + a)
    if (sin_c < 0.0 and cos_c <= 0.0) or (sin_c == 0.0 and cos_c < 0.0):
        raise Unreachable(arm_index, "knee angle outside the canonical branch")
    theta = math.atan2(sin_c, cos_c)
    return theta, yj, zj


def solve_arm_angle(geometry: RobotGeometry, pose: Pose, arm_index: int) -> ArmSolution:
    """Inverse kinematics for a single arm; raises Unreachable on failure."""
    if arm_index not in (1, 2, 3):
        raise ValueError(f"arm_index must be 1, 2 or 3, got {arm_index!r}")
    c = ARM_COS[arm_index - 1]
    s = ARM_SIN[arm_index - 1]
    xp = pose.x * c - pose.y * s
    yp = pose.x * s + pose.y * c
    theta, yj, zj = _solve_arm_yz(
        geometry.a, geometry.b, geometry.r_f, geometry.r_e, xp, yp, pose.z, arm_index
    )
    return ArmSolution(arm_index=arm_index, theta=theta, knee=(yj, zj))


def inverse_kinematics(geometry: RobotGeometry, pose: Pose) -> JointAngles:
    """Joint angles reaching the pose; raises Unreachable naming the arm."""
    a = geometry.a
    b = geometry.b
    r_f = geometry.r_f
    r_e = geometry.r_e
    x = pose.x
    y = pose.y
    z = pose.z
    thetas = []
    for arm in (1, 2, 3):
        c = ARM_COS[arm - 1]
        s = ARM_SIN[arm - 1]
        xp = x * c - y * s
        yp = x * s + y * c
        theta, _, _ = _solve_arm_yz(a, b, r_f, r_e, xp, yp, z, arm)
        thetas.append(theta)
    return JointAngles(thetas[0], thetas[1], thetas[2])


def is_reachable(geometry: RobotGeometry, pose: Pose) -> bool:
    """True when inverse kinematics succeeds for all three arms."""
    try:
        inverse_kinematics(geometry, pose)
    except Unreachable:
        return False
    return True


def _det3(r0, r1, r2) -> float:
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def forward_kinematics(geometry: RobotGeometry, joints: JointAngles) -> Pose:
    """Effector pose for the joint angles; the below-base assembly branch.

    Shifts every knee by the effector offset so all three forearm spheres
    pass through the platform centroid, then intersects the spheres by
    pairwise subtraction: two planes, their line, and a quadratic along it.
    """
    a = geometry.a
    b = geometry.b
    r_f = geometry.r_f
    r_e = geometry.r_e

    centers = []
    for i, theta in enumerate(joints.as_tuple()):
        if not (THETA_MIN < theta < THETA_MAX):
            raise ValueError(f"theta{i + 1}={theta} outside canonical joint range")
        t = a - b + r_f * math.cos(theta)
        zc = -r_f * math.sin(theta)
        c = ARM_COS[i]
        s = ARM_SIN[i]
        # Arm-frame centre (0, -t, zc) rotated back to the world frame.
        centers.append(((-t) * s, (-t) * c, zc))

    c1, c2, c3 = centers
    ux, uy, uz = c2[0] - c1[0], c2[1] - c1[1], c2[2] - c1[2]
    vx, vy, vz = c3[0] - c1[0], c3[1] - c1[1], c3[2] - c1[2]
    nx = uy * vz - uz * vy
    ny = uz * vx - ux * vz
    nz = ux * vy - uy * vx
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    un = math.sqrt(ux * ux + uy * uy + uz * uz)
    vn = math.sqrt(vx * vx + vy * vy + vz * vz)
    # Coincidence is judged against the forearm length, collinearity against
    # the centre spacing; both at the same relative tolerance.
    if un < RANK_TOL * r_e or vn < RANK_TOL * r_e or nn < RANK_TOL * un * vn:
        raise Singular("shifted sphere centres are collinear or coincident")

    # Plane equations from pairwise sphere subtraction (equal radii), plus
    # the centre plane through c1 to pin a particular point on the line.
    sq1 = c1[0] * c1[0] + c1[1] * c1[1] + c1[2] * c1[2]
    sq2 = c2[0] * c2[0] + c2[1] * c2[1] + c2[2] * c2[2]
    sq3 = c3[0] * c3[0] + c3[1] * c3[1] + c3[2] * c3[2]
    rows = (
        (2.0 * ux, 2.0 * uy, 2.0 * uz),
        (2.0 * vx, 2.0 * vy, 2.0 * vz),
        (nx, ny, nz),
    )
    rhs = (sq2 - sq1, sq3 - sq1, nx * c1[0] + ny * c1[1] + nz * c1[2])

    det = _det3(*rows)
    if det == 0.0:
        raise Singular("plane-intersection system is rank deficient")
    px = _det3((rhs[0], rows[0][1], rows[0][2]),
               (rhs[1], rows[1][1], rows[1][2]),
               (rhs[2], rows[2][1], rows[2][2])) / det
    py = _det3((rows[0][0], rhs[0], rows[0][2]),
               (rows[1][0], rhs[1], rows[1][2]),
               (rows[2][0], rhs[2], rows[2][2])) / det
    pz = _det3((rows[0][0], rows[0][1], rhs[0]),
               (rows[1][0], rows[1][1], rhs[1]),
               (rows[2][0], rows[2][1], rhs[2])) / det

    # The particular point lies in the centre plane, so the quadratic along
    # the line direction reduces to s^2 = r_e^2 - |p - c1|^2.
    wx, wy, wz = px - c1[0], py - c1[1], pz - c1[2]
    disc = r_e * r_e - (wx * wx + wy * wy + wz * wz)
    tol = DISC_TOL_FRAC * (r_e * r_e)
    if disc < -tol:
        raise NoSolution("forearm spheres share no common point")
    if disc < 0.0:
        disc = 0.0
    step = math.sqrt(disc)

    hx, hy, hz = nx / nn, ny / nn, nz / nn
    if hz > 0.0:
        step = -step
    x = px + step * hx
    y = py + step * hy
    z = pz + step * hz
    if not z < 0.0:
        raise NoSolution("assembly point does not lie below the base plane")
    return Pose(x, y, z)

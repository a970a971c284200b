"""Deterministic fixed-timestep 2.5-D rover physics.

Differential-drive motion on a heightfield with kinematic wheel-terrain
contact: pose (pitch/roll) follows the four wheel contact heights plus the
active-suspension lift, forward speed is gated when a wheel presses against a
step it cannot clear, and body rates are backward differences. All operations
are pure functions of their inputs; repeated evaluation is bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _kernels
from .core import OutOfTerrain
from .terrain import Heightfield, Obstacle

DT = 0.02  # control/physics timestep, s (50 Hz)


@dataclass(frozen=True)
class Twist:
    """Velocity command: forward body speed and yaw rate."""

    linear: float   # m/s
    angular: float  # rad/s


@dataclass(frozen=True)
class RoverGeometry:
    track_width: float = 0.4     # b, m
    wheel_radius: float = 0.1    # r, m
    wheelbase: float = 0.5       # L, m
    chassis_length: float = 0.6  # m
    mass: float = 6.0            # kg

    def __post_init__(self):
        for name in ("track_width", "wheel_radius", "wheelbase",
                     "chassis_length", "mass"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class DynamicsParams:
    """Limits, actuator constants, and sensor constants for the simulator."""

    geometry: RoverGeometry = field(default_factory=RoverGeometry)
    v_max: float = 1.5            # m/s
    w_max: float = 2.0            # rad/s
    suspension_arm: float = 0.45  # m; lift_i = arm * sin(joint_angle_i)
    joint_limit: float = 0.6      # rad, mechanical limit
    motor_gain: float = 1.5       # rad/s toward target at full command error
    slew_limit: float = 2.0       # rad/s
    eps_step: float = 0.02        # m, step-detection threshold
    gate_tol: float = 0.02        # m, lift tolerance band when clearing a step
    lidar_max_range: float = 5.0  # m
    lidar_window: float = 0.5     # m, peak-search window past the step face
    sigma_imu: float = 0.0        # rad / rad/s noise std; 0 = exact

    @property
    def h_block(self) -> float:
        """Step height that fully stalls an unassisted wheel."""
        return 1.5 * self.geometry.wheel_radius


@dataclass(frozen=True)
class SuspensionState:
    joint_angles: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    joint_targets: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    motor_commands: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RoverState:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0   # rad, normalized to (-pi, pi]
    pitch: float = 0.0     # rad, nose-up positive
    roll: float = 0.0      # rad, left-side-up positive
    pitch_rate: float = 0.0
    roll_rate: float = 0.0
    yaw_rate: float = 0.0
    wheel_left: float = 0.0   # rad/s
    wheel_right: float = 0.0  # rad/s
    suspension: SuspensionState = field(default_factory=SuspensionState)
    tick: int = 0


@dataclass(frozen=True)
class ImuReading:
    pitch: float
    roll: float
    pitch_rate: float
    roll_rate: float
    yaw_rate: float


@dataclass(frozen=True)
class LidarReading:
    obstacle_height: float    # m above the current contact plane
    obstacle_distance: float  # m from the front wheel center, <= max_range


def wheel_speeds_from_twist(t: Twist, g: RoverGeometry) -> tuple[float, float]:
    """Inverse differential-drive kinematics: twist to wheel rates (rad/s)."""
    half = g.track_width / 2.0
    return ((t.linear - t.angular * half) / g.wheel_radius,
            (t.linear + t.angular * half) / g.wheel_radius)


def suspension_lift(joint_angle: float, params: DynamicsParams) -> float:
    """Vertical chassis-corner displacement produced by one lift joint."""
    return params.suspension_arm * math.sin(joint_angle)


def settle_attitude(state: RoverState, terrain: Heightfield,
                    params: DynamicsParams) -> RoverState:
    """Recompute pitch/roll from the wheel contacts at the current pose.

    Used at episode start so the initial state is already consistent with
    the terrain (integrate() would otherwise report a spurious first-tick
    attitude rate)."""
    g = params.geometry
    hb, ht = g.wheelbase / 2.0, g.track_width / 2.0
    ch, sh = math.cos(state.heading), math.sin(state.heading)
    corners = []
    for bx, by, ja in ((hb, ht, state.suspension.joint_angles[0]),
                       (hb, -ht, state.suspension.joint_angles[1]),
                       (-hb, ht, state.suspension.joint_angles[2]),
                       (-hb, -ht, state.suspension.joint_angles[3])):
        wx = state.x + bx * ch - by * sh
        wy = state.y + bx * sh + by * ch
        corners.append(terrain.height_at(wx, wy) + g.wheel_radius
                       + suspension_lift(ja, params))
    front = (corners[0] + corners[1]) * 0.5
    rear = (corners[2] + corners[3]) * 0.5
    left = (corners[0] + corners[2]) * 0.5
    right = (corners[1] + corners[3]) * 0.5
    return replace(state,
                   pitch=math.atan2(front - rear, g.wheelbase),
                   roll=math.atan2(left - right, g.track_width),
                   pitch_rate=0.0, roll_rate=0.0, yaw_rate=0.0)


def chassis_height(state: RoverState, terrain: Heightfield,
                   params: DynamicsParams) -> float:
    """Chassis-center elevation: mean of the four corner heights."""
    g = params.geometry
    hb, ht = g.wheelbase / 2.0, g.track_width / 2.0
    ch, sh = math.cos(state.heading), math.sin(state.heading)
    total = 0.0
    for i, (bx, by) in enumerate(((hb, ht), (hb, -ht), (-hb, ht), (-hb, -ht))):
        wx = state.x + bx * ch - by * sh
        wy = state.y + bx * sh + by * ch
        total += terrain.height_at(wx, wy) + g.wheel_radius \
            + suspension_lift(state.suspension.joint_angles[i], params)
    return total / 4.0


def integrate(state: RoverState, twist: Twist, motor_commands,
              terrain: Heightfield, dt: float = DT,
              params: DynamicsParams = DynamicsParams()) -> RoverState:
    """Advance the rover by one timestep; pure function of its inputs.

    Heading integrates first; translation advances along the midpoint
    heading with the climb-gated forward speed; each suspension joint lags
    toward its commanded target angle (command * joint_limit) at
    motor_gain/joint_limit per unit error, slew- and limit-clamped;
    pitch/roll re-settle on the four wheel contacts; rates are backward
    differences over dt.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = params.geometry
    v = min(max(twist.linear, -params.v_max), params.v_max)
    w = min(max(twist.angular, -params.w_max), params.w_max)
    m = [min(max(float(c), -1.0), 1.0) for c in motor_commands]
    if len(m) != 4:
        raise ValueError("exactly 4 motor commands required")
    ja = state.suspension.joint_angles
    out = _kernels.impl.step_pose(
        terrain.heights, terrain.resolution, terrain.x0, terrain.y0,
        state.x, state.y, state.heading, state.pitch, state.roll,
        ja[0], ja[1], ja[2], ja[3],
        v, w, m[0], m[1], m[2], m[3],
        dt, g.track_width / 2.0, g.wheelbase / 2.0, g.wheel_radius,
        params.suspension_arm, params.motor_gain, params.slew_limit,
        params.joint_limit, params.eps_step, params.h_block, params.gate_tol)
    if out[0] == 0:
        raise OutOfTerrain(
            f"rover footprint left the terrain near ({state.x:.2f}, {state.y:.2f})")
    (_, nx, ny, nh, npitch, nroll, pitch_rate, roll_rate, yaw_rate, v_eff,
     nj0, nj1, nj2, nj3, nt0, nt1, nt2, nt3) = out
    wl, wr = wheel_speeds_from_twist(Twist(v_eff, w), g)
    return RoverState(
        x=nx, y=ny, heading=nh, pitch=npitch, roll=nroll,
        pitch_rate=pitch_rate, roll_rate=roll_rate, yaw_rate=yaw_rate,
        wheel_left=wl, wheel_right=wr,
        suspension=SuspensionState(
            joint_angles=(nj0, nj1, nj2, nj3),
            joint_targets=(nt0, nt1, nt2, nt3),
            motor_commands=(m[0], m[1], m[2], m[3])),
        tick=state.tick + 1)


def climb_gate(state: RoverState, obstacle: Optional[Obstacle],
               suspension: SuspensionState,
               params: DynamicsParams = DynamicsParams()) -> float:
    """Forward-speed scale in [0, 1] while a front wheel presses the face of
    a step obstacle.

    The gate is open (1.0) without face contact. In contact, commanded lift
    at the leading joints that clears the step keeps it open; otherwise the
    speed scales by max(0, 1 - h / h_block)."""
    if obstacle is None:
        return 1.0
    g = params.geometry
    front_x = state.x + (g.wheelbase / 2.0) * math.cos(state.heading)
    if not (obstacle.x_start - g.wheel_radius <= front_x < obstacle.x_start):
        return 1.0
    lift = (suspension_lift(suspension.joint_angles[0], params)
            + suspension_lift(suspension.joint_angles[1], params)) / 2.0
    need = obstacle.height - g.wheel_radius * (1.0 - math.cos(state.pitch)) \
        - params.gate_tol
    if lift >= need:
        return 1.0
    return max(0.0, 1.0 - obstacle.height / params.h_block)


def imu_read(state: RoverState, rng: Optional[np.random.Generator] = None,
             sigma: float = 0.0) -> ImuReading:
    """IMU channels from the state; optional zero-mean Gaussian noise."""
    vals = [state.pitch, state.roll, state.pitch_rate, state.roll_rate,
            state.yaw_rate]
    if sigma > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma > 0")
        noise = rng.normal(0.0, sigma, size=5)
        vals = [v + float(n) for v, n in zip(vals, noise)]
    return ImuReading(*vals)


def lidar_scan(state: RoverState, terrain: Heightfield,
               params: DynamicsParams = DynamicsParams()) -> LidarReading:
    """Horizontal ray from the front wheel center along the heading, marched
    at terrain resolution. No exceedance within range gives (0, max_range)."""
    g = params.geometry
    ch, sh = math.cos(state.heading), math.sin(state.heading)
    sx = state.x + (g.wheelbase / 2.0) * ch
    sy = state.y + (g.wheelbase / 2.0) * sh
    contact_h = _kernels.impl.bilinear(
        terrain.heights, terrain.resolution, terrain.x0, terrain.y0, sx, sy)
    if math.isnan(contact_h):
        raise OutOfTerrain("lidar origin outside terrain")
    height, distance = _kernels.impl.lidar_march(
        terrain.heights, terrain.resolution, terrain.x0, terrain.y0,
        sx, sy, state.heading, contact_h,
        params.lidar_max_range, params.eps_step, params.lidar_window)
    return LidarReading(obstacle_height=height, obstacle_distance=distance)


def depth_camera(state: RoverState, terrain: Heightfield,
                 params: DynamicsParams = DynamicsParams(),
                 n_cols: int = 32, n_rows: int = 24,
                 mast_height: float = 0.3, cam_pitch: float = -0.35,
                 h_fov: float = 1.0472, v_fov: float = 0.7854,
                 max_depth: float = 5.0, march: float = 0.04) -> np.ndarray:
    """Raycast depth image from a mast-mounted camera, row-major meters."""
    cam_z = chassis_height(state, terrain, params) + mast_height
    return _kernels.impl.depth_raster(
        terrain.heights, terrain.resolution, terrain.x0, terrain.y0,
        state.x, state.y, cam_z, state.heading, cam_pitch,
        h_fov, v_fov, n_cols, n_rows, max_depth, march)

"""Pure-Python reference kernels for the per-tick hot loops.

The compiled backend (_core.pyx) mirrors these functions statement for
statement; both must perform the same IEEE-754 double operations in the same
order so trajectories are bit-identical whichever backend is active. Keep all
math on plain floats via the math module (numpy's vectorized routines are not
guaranteed to match libm bit-for-bit).
"""

from __future__ import annotations

import math

import numpy as np

NAN = float("nan")


def wrap_angle(h: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    w = math.fmod(h + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def bilinear(heights: np.ndarray, res: float, x0: float, y0: float,
             x: float, y: float) -> float:
    """Bilinear height interpolation; NaN outside the grid bounds."""
    ny = heights.shape[0]
    nx = heights.shape[1]
    gx = (x - x0) / res
    gy = (y - y0) / res
    if gx < 0.0 or gy < 0.0 or gx > nx - 1.0 or gy > ny - 1.0:
        return NAN
    ix = int(math.floor(gx))
    iy = int(math.floor(gy))
    if ix > nx - 2:
        ix = nx - 2
    if iy > ny - 2:
        iy = ny - 2
    fx = gx - ix
    fy = gy - iy
    h00 = float(heights[iy, ix])
    h01 = float(heights[iy, ix + 1])
    h10 = float(heights[iy + 1, ix])
    h11 = float(heights[iy + 1, ix + 1])
    return (h00 * (1.0 - fx) + h01 * fx) * (1.0 - fy) + \
           (h10 * (1.0 - fx) + h11 * fx) * fy


def step_pose(heights, res, x0, y0,
              x, y, heading, pitch, roll,
              j0, j1, j2, j3,
              v_cmd, w_cmd, m0, m1, m2, m3,
              dt, half_track, half_base, wheel_radius, arm,
              k_m, slew, joint_limit,
              eps_step, h_block, gate_tol):
    """One semi-implicit tick: heading, climb gate, position, suspension,
    wheel-contact pitch/roll, backward-difference body rates.

    Returns (ok, x, y, heading, pitch, roll, pitch_rate, roll_rate,
    yaw_rate, v_eff, j0..j3, t0..t3); ok == 0 means the footprint left the
    terrain and the remaining fields are undefined.

    Translation samples the heading at the step midpoint: endpoint sampling
    carries O(dt) arc error (~2 cm/s of turn at dt=0.02), midpoint stays
    within the 1e-3 m oracle tolerance while leaving straight-line motion
    exact.
    """
    nh = wrap_angle(heading + w_cmd * dt)
    hmid = wrap_angle(heading + w_cmd * (dt * 0.5))
    chm = math.cos(hmid)
    shm = math.sin(hmid)
    ch = math.cos(nh)
    sh = math.sin(nh)

    # Climb gate: probe one wheel radius ahead of the front-axle center.
    fx = x + half_base * ch
    fy = y + half_base * sh
    contact_h = bilinear(heights, res, x0, y0, fx, fy)
    v_scale = 1.0
    if not math.isnan(contact_h):
        probe_h = bilinear(heights, res, x0, y0,
                           fx + wheel_radius * ch, fy + wheel_radius * sh)
        if not math.isnan(probe_h):
            h_step = probe_h - contact_h
            if h_step > eps_step:
                lift_front = arm * (math.sin(j0) + math.sin(j1)) * 0.5
                need = h_step - wheel_radius * (1.0 - math.cos(pitch)) - gate_tol
                if lift_front >= need:
                    v_scale = 1.0
                else:
                    v_scale = 1.0 - h_step / h_block
                    if v_scale < 0.0:
                        v_scale = 0.0
    v_eff = v_cmd * v_scale

    nx_ = x + v_eff * chm * dt
    ny_ = y + v_eff * shm * dt

    # First-order lag toward the commanded target angle (cmd * joint_limit),
    # rate k_m/joint_limit per unit error, slew-clamped. At zero angle a full
    # command moves at exactly k_m rad/s.
    joints = (j0, j1, j2, j3)
    motors = (m0, m1, m2, m3)
    nj = [0.0, 0.0, 0.0, 0.0]
    nt = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        target = joint_limit * motors[i]
        nt[i] = target
        rate = (k_m / joint_limit) * (target - joints[i])
        if rate > slew:
            rate = slew
        elif rate < -slew:
            rate = -slew
        angle = joints[i] + rate * dt
        if angle > joint_limit:
            angle = joint_limit
        elif angle < -joint_limit:
            angle = -joint_limit
        nj[i] = angle

    # Wheel contacts at the new pose: FL, FR, RL, RR.
    corners = [0.0, 0.0, 0.0, 0.0]
    bxs = (half_base, half_base, -half_base, -half_base)
    bys = (half_track, -half_track, half_track, -half_track)
    for i in range(4):
        wx = nx_ + bxs[i] * ch - bys[i] * sh
        wy = ny_ + bxs[i] * sh + bys[i] * ch
        th = bilinear(heights, res, x0, y0, wx, wy)
        if math.isnan(th):
            return (0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        corners[i] = th + wheel_radius + arm * math.sin(nj[i])

    front = (corners[0] + corners[1]) * 0.5
    rear = (corners[2] + corners[3]) * 0.5
    left = (corners[0] + corners[2]) * 0.5
    right = (corners[1] + corners[3]) * 0.5
    npitch = math.atan2(front - rear, 2.0 * half_base)
    nroll = math.atan2(left - right, 2.0 * half_track)

    pitch_rate = (npitch - pitch) / dt
    roll_rate = (nroll - roll) / dt
    yaw_rate = wrap_angle(nh - heading) / dt

    return (1, nx_, ny_, nh, npitch, nroll, pitch_rate, roll_rate, yaw_rate,
            v_eff, nj[0], nj[1], nj[2], nj[3], nt[0], nt[1], nt[2], nt[3])


def lidar_march(heights, res, x0, y0, sx, sy, heading, contact_h,
                max_range, eps_step, window):
    """March a horizontal ray at terrain resolution; first exceedance of the
    contact height + eps defines the hit. Returns (obstacle_height, distance);
    no hit (or leaving the grid) returns (0, max_range)."""
    ch = math.cos(heading)
    sh = math.sin(heading)
    n = int(math.floor(max_range / res + 1e-9))
    wn = int(math.floor(window / res + 1e-9))
    k = 1
    while k <= n:
        d = k * res
        th = bilinear(heights, res, x0, y0, sx + d * ch, sy + d * sh)
        if math.isnan(th):
            return (0.0, max_range)
        if th > contact_h + eps_step:
            peak = th
            j = k + 1
            while j <= k + wn:
                t2 = bilinear(heights, res, x0, y0,
                              sx + (j * res) * ch, sy + (j * res) * sh)
                if math.isnan(t2):
                    break
                if t2 > peak:
                    peak = t2
                j += 1
            return (peak - contact_h, d)
        k += 1
    return (0.0, max_range)


def depth_raster(heights, res, x0, y0, cam_x, cam_y, cam_z, yaw, cam_pitch,
                 h_fov, v_fov, n_cols, n_rows, max_depth, march):
    """Raycast depth image (row-major, n_rows x n_cols flattened): distance to
    first terrain intersection per ray, max_depth when none."""
    out = np.empty(n_rows * n_cols, dtype=np.float64)
    for ri in range(n_rows):
        el = cam_pitch + v_fov * (0.5 - (ri + 0.5) / n_rows)
        cel = math.cos(el)
        sel = math.sin(el)
        for ci in range(n_cols):
            az = yaw + h_fov * (0.5 - (ci + 0.5) / n_cols)
            dx = cel * math.cos(az)
            dy = cel * math.sin(az)
            dz = sel
            depth = max_depth
            t = march
            while t <= max_depth:
                g = bilinear(heights, res, x0, y0, cam_x + dx * t, cam_y + dy * t)
                if math.isnan(g):
                    break
                if cam_z + dz * t <= g:
                    depth = t
                    break
                t += march
            out[ri * n_cols + ci] = depth
    return out

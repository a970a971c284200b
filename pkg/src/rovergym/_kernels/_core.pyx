# cython: boundscheck=False, wraparound=False, cdivision=False
"""Compiled mirror of pure.py: same IEEE-754 operations in the same order so
both backends produce bit-identical trajectories. Built with -ffp-contract=off
to forbid fused multiply-add reassociation."""

import numpy as np

from libc.math cimport atan2, cos, fabs, floor, fmod, isnan, sin, NAN

cdef double PI = 3.141592653589793


cpdef double wrap_angle(double h):
    """Normalize an angle to (-pi, pi]."""
    cdef double w = fmod(h + PI, 2.0 * PI)
    if w <= 0.0:
        w += 2.0 * PI
    return w - PI


cdef inline double _bilinear(const double[:, ::1] heights, double res,
                             double x0, double y0, double x, double y):
    cdef Py_ssize_t ny = heights.shape[0]
    cdef Py_ssize_t nx = heights.shape[1]
    cdef double gx = (x - x0) / res
    cdef double gy = (y - y0) / res
    if gx < 0.0 or gy < 0.0 or gx > nx - 1.0 or gy > ny - 1.0:
        return NAN
    cdef Py_ssize_t ix = <Py_ssize_t>floor(gx)
    cdef Py_ssize_t iy = <Py_ssize_t>floor(gy)
    if ix > nx - 2:
        ix = nx - 2
    if iy > ny - 2:
        iy = ny - 2
    cdef double fx = gx - ix
    cdef double fy = gy - iy
    cdef double h00 = heights[iy, ix]
    cdef double h01 = heights[iy, ix + 1]
    cdef double h10 = heights[iy + 1, ix]
    cdef double h11 = heights[iy + 1, ix + 1]
    return (h00 * (1.0 - fx) + h01 * fx) * (1.0 - fy) + \
           (h10 * (1.0 - fx) + h11 * fx) * fy


def bilinear(const double[:, ::1] heights, double res, double x0, double y0,
             double x, double y):
    return _bilinear(heights, res, x0, y0, x, y)


def step_pose(const double[:, ::1] heights, double res, double x0, double y0,
              double x, double y, double heading, double pitch, double roll,
              double j0, double j1, double j2, double j3,
              double v_cmd, double w_cmd,
              double m0, double m1, double m2, double m3,
              double dt, double half_track, double half_base,
              double wheel_radius, double arm,
              double k_m, double slew, double joint_limit,
              double eps_step, double h_block, double gate_tol):
    cdef double nh = wrap_angle(heading + w_cmd * dt)
    cdef double hmid = wrap_angle(heading + w_cmd * (dt * 0.5))
    cdef double chm = cos(hmid)
    cdef double shm = sin(hmid)
    cdef double ch = cos(nh)
    cdef double sh = sin(nh)

    cdef double fx = x + half_base * ch
    cdef double fy = y + half_base * sh
    cdef double contact_h = _bilinear(heights, res, x0, y0, fx, fy)
    cdef double v_scale = 1.0
    cdef double probe_h, h_step, lift_front, need
    if not isnan(contact_h):
        probe_h = _bilinear(heights, res, x0, y0,
                            fx + wheel_radius * ch, fy + wheel_radius * sh)
        if not isnan(probe_h):
            h_step = probe_h - contact_h
            if h_step > eps_step:
                lift_front = arm * (sin(j0) + sin(j1)) * 0.5
                need = h_step - wheel_radius * (1.0 - cos(pitch)) - gate_tol
                if lift_front >= need:
                    v_scale = 1.0
                else:
                    v_scale = 1.0 - h_step / h_block
                    if v_scale < 0.0:
                        v_scale = 0.0
    cdef double v_eff = v_cmd * v_scale

    cdef double nx_ = x + v_eff * chm * dt
    cdef double ny_ = y + v_eff * shm * dt

    cdef double joints[4]
    cdef double motors[4]
    cdef double nj[4]
    cdef double nt[4]
    joints[0] = j0; joints[1] = j1; joints[2] = j2; joints[3] = j3
    motors[0] = m0; motors[1] = m1; motors[2] = m2; motors[3] = m3
    cdef Py_ssize_t i
    cdef double rate, target, angle
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

    cdef double corners[4]
    cdef double bxs[4]
    cdef double bys[4]
    bxs[0] = half_base; bxs[1] = half_base; bxs[2] = -half_base; bxs[3] = -half_base
    bys[0] = half_track; bys[1] = -half_track; bys[2] = half_track; bys[3] = -half_track
    cdef double wx, wy, th
    for i in range(4):
        wx = nx_ + bxs[i] * ch - bys[i] * sh
        wy = ny_ + bxs[i] * sh + bys[i] * ch
        th = _bilinear(heights, res, x0, y0, wx, wy)
        if isnan(th):
            return (0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        corners[i] = th + wheel_radius + arm * sin(nj[i])

    cdef double front = (corners[0] + corners[1]) * 0.5
    cdef double rear = (corners[2] + corners[3]) * 0.5
    cdef double left = (corners[0] + corners[2]) * 0.5
    cdef double right = (corners[1] + corners[3]) * 0.5
    cdef double npitch = atan2(front - rear, 2.0 * half_base)
    cdef double nroll = atan2(left - right, 2.0 * half_track)

    cdef double pitch_rate = (npitch - pitch) / dt
    cdef double roll_rate = (nroll - roll) / dt
    cdef double yaw_rate = wrap_angle(nh - heading) / dt

    return (1, nx_, ny_, nh, npitch, nroll, pitch_rate, roll_rate, yaw_rate,
            v_eff, nj[0], nj[1], nj[2], nj[3], nt[0], nt[1], nt[2], nt[3])


def lidar_march(const double[:, ::1] heights, double res, double x0, double y0,
                double sx, double sy, double heading, double contact_h,
                double max_range, double eps_step, double window):
    cdef double ch = cos(heading)
    cdef double sh = sin(heading)
    cdef Py_ssize_t n = <Py_ssize_t>floor(max_range / res + 1e-9)
    cdef Py_ssize_t wn = <Py_ssize_t>floor(window / res + 1e-9)
    cdef Py_ssize_t k = 1
    cdef Py_ssize_t j
    cdef double d, th, peak, t2
    while k <= n:
        d = k * res
        th = _bilinear(heights, res, x0, y0, sx + d * ch, sy + d * sh)
        if isnan(th):
            return (0.0, max_range)
        if th > contact_h + eps_step:
            peak = th
            j = k + 1
            while j <= k + wn:
                t2 = _bilinear(heights, res, x0, y0,
                               sx + (j * res) * ch, sy + (j * res) * sh)
                if isnan(t2):
                    break
                if t2 > peak:
                    peak = t2
                j += 1
            return (peak - contact_h, d)
        k += 1
    return (0.0, max_range)


def depth_raster(const double[:, ::1] heights, double res, double x0, double y0,
                 double cam_x, double cam_y, double cam_z, double yaw,
                 double cam_pitch, double h_fov, double v_fov,
                 Py_ssize_t n_cols, Py_ssize_t n_rows,
                 double max_depth, double march):
    out_arr = np.empty(n_rows * n_cols, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ri, ci
    cdef double el, cel, sel, az, dx, dy, dz, depth, t, g
    for ri in range(n_rows):
        el = cam_pitch + v_fov * (0.5 - (ri + 0.5) / n_rows)
        cel = cos(el)
        sel = sin(el)
        for ci in range(n_cols):
            az = yaw + h_fov * (0.5 - (ci + 0.5) / n_cols)
            dx = cel * cos(az)
            dy = cel * sin(az)
            dz = sel
            depth = max_depth
            t = march
            while t <= max_depth:
                g = _bilinear(heights, res, x0, y0, cam_x + dx * t, cam_y + dy * t)
                if isnan(g):
                    break
                if cam_z + dz * t <= g:
                    depth = t
                    break
                t += march
            out[ri * n_cols + ci] = depth
    return out_arr

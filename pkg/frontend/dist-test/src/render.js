"use strict";
/** Canvas 2-D views: side profile (terrain slice, chassis, wheels,
 * suspension, lidar ray), top-down pose trace, and scrolling telemetry
 * plots. The geometry helpers are pure and unit-testable. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.SUSPENSION_ARM = exports.SLICE_AHEAD = exports.SLICE_BACK = exports.WHEEL_RADIUS = exports.CHASSIS_HEIGHT = exports.CHASSIS_LENGTH = void 0;
exports.chassisOutline = chassisOutline;
exports.mapRange = mapRange;
exports.drawSideView = drawSideView;
exports.drawTopView = drawTopView;
exports.drawPlot = drawPlot;
// side-view geometry constants (meters)
exports.CHASSIS_LENGTH = 0.6;
exports.CHASSIS_HEIGHT = 0.12;
exports.WHEEL_RADIUS = 0.1;
exports.SLICE_BACK = 1.0; // slice spans [-1, +4] m around the rover
exports.SLICE_AHEAD = 4.0;
exports.SUSPENSION_ARM = 0.45;
/** Chassis corner points in the side view (x along travel, z up), rotated
 * by pitch about the chassis center. */
function chassisOutline(pitch, centerZ) {
    const hl = exports.CHASSIS_LENGTH / 2;
    const hh = exports.CHASSIS_HEIGHT / 2;
    const c = Math.cos(pitch);
    const s = Math.sin(pitch);
    return [
        { x: -hl, z: -hh }, { x: hl, z: -hh },
        { x: hl, z: hh }, { x: -hl, z: hh },
    ].map(p => ({ x: p.x * c - p.z * s, z: centerZ + p.x * s + p.z * c }));
}
/** Linear map from a value range onto a pixel range. */
function mapRange(v, lo, hi, pxLo, pxHi) {
    return pxLo + ((v - lo) / (hi - lo)) * (pxHi - pxLo);
}
function sliceExtent(slice) {
    let lo = Math.min(...slice, 0);
    let hi = Math.max(...slice, 0.3);
    return { lo: lo - 0.1, hi: hi + 0.45 };
}
function drawSideView(ctx, state) {
    const { width, height } = ctx.canvas;
    ctx.clearRect(0, 0, width, height);
    const frame = state.latestFrame;
    if (!frame) {
        return;
    }
    const slice = frame.terrain_slice;
    const { lo, hi } = sliceExtent(slice);
    const toPx = (d, z) => ({
        px: mapRange(d, -exports.SLICE_BACK, exports.SLICE_AHEAD, 20, width - 20),
        py: mapRange(z, lo, hi, height - 15, 15),
    });
    // terrain profile along the heading
    ctx.beginPath();
    slice.forEach((z, i) => {
        const d = -exports.SLICE_BACK + (exports.SLICE_BACK + exports.SLICE_AHEAD) * i / (slice.length - 1);
        const { px, py } = toPx(d, z);
        i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.strokeStyle = "#8a6b4a";
    ctx.lineWidth = 2;
    ctx.stroke();
    // ground height under the rover center (middle of the back span)
    const centerIdx = Math.round((exports.SLICE_BACK / (exports.SLICE_BACK + exports.SLICE_AHEAD))
        * (slice.length - 1));
    const groundZ = slice[centerIdx];
    const chassisZ = groundZ + exports.WHEEL_RADIUS
        + exports.SUSPENSION_ARM * avgLift(frame.suspension) + exports.CHASSIS_HEIGHT;
    // wheels: front/rear at +/- 0.25 m with suspension lift
    for (const [dx, jointIdx] of [[0.25, 0], [-0.25, 2]]) {
        const lift = exports.SUSPENSION_ARM * Math.sin(frame.suspension[jointIdx]);
        const wz = sliceAt(slice, dx) + exports.WHEEL_RADIUS;
        const { px, py } = toPx(dx, wz);
        const rPx = Math.abs(toPx(0, exports.WHEEL_RADIUS).py - toPx(0, 0).py);
        ctx.beginPath();
        ctx.arc(px, py, rPx, 0, 2 * Math.PI);
        ctx.strokeStyle = "#333";
        ctx.stroke();
        // suspension strut up to the chassis
        const top = toPx(dx, wz + exports.WHEEL_RADIUS + Math.max(lift, 0) + 0.05);
        ctx.beginPath();
        ctx.moveTo(px, py - rPx);
        ctx.lineTo(top.px, top.py);
        ctx.strokeStyle = "#777";
        ctx.stroke();
    }
    // chassis rotated by pitch
    const outline = chassisOutline(frame.pose.pitch, chassisZ);
    ctx.beginPath();
    outline.forEach((p, i) => {
        const { px, py } = toPx(p.x, p.z);
        i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.closePath();
    ctx.fillStyle = "#c8502d";
    ctx.fill();
    // lidar ray from the front wheel with its reading
    const origin = toPx(0.25, sliceAt(slice, 0.25) + exports.WHEEL_RADIUS);
    const hit = toPx(0.25 + frame.lidar.distance, sliceAt(slice, 0.25) + exports.WHEEL_RADIUS);
    ctx.beginPath();
    ctx.moveTo(origin.px, origin.py);
    ctx.lineTo(hit.px, hit.py);
    ctx.strokeStyle = "#2d7dc8";
    ctx.setLineDash([4, 3]);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#2d7dc8";
    ctx.font = "11px monospace";
    ctx.fillText(`h=${frame.lidar.height.toFixed(2)} d=${frame.lidar.distance.toFixed(2)}`, Math.min(hit.px, width - 110), hit.py - 6);
}
function avgLift(suspension) {
    return suspension.reduce((acc, a) => acc + Math.sin(a), 0)
        / suspension.length;
}
function sliceAt(slice, d) {
    const i = Math.round(((d + exports.SLICE_BACK) / (exports.SLICE_BACK + exports.SLICE_AHEAD))
        * (slice.length - 1));
    return slice[Math.max(0, Math.min(slice.length - 1, i))];
}
function drawTopView(ctx, state) {
    const { width, height } = ctx.canvas;
    ctx.clearRect(0, 0, width, height);
    if (state.trace.length === 0) {
        return;
    }
    const xs = state.trace.map(p => p.x);
    const ys = state.trace.map(p => p.y);
    const xLo = Math.min(...xs) - 1;
    const xHi = Math.max(...xs) + 1;
    const yLo = Math.min(...ys) - 1;
    const yHi = Math.max(...ys) + 1;
    const toPx = (x, y) => ({
        px: mapRange(x, xLo, xHi, 15, width - 15),
        py: mapRange(y, yLo, yHi, height - 15, 15),
    });
    ctx.beginPath();
    state.trace.forEach((p, i) => {
        const { px, py } = toPx(p.x, p.y);
        i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.strokeStyle = "#999";
    ctx.stroke();
    const pose = state.latestFrame?.pose;
    if (pose) {
        const { px, py } = toPx(pose.x, pose.y);
        ctx.beginPath();
        ctx.arc(px, py, 5, 0, 2 * Math.PI);
        ctx.fillStyle = "#c8502d";
        ctx.fill();
        ctx.beginPath();
        ctx.moveTo(px, py);
        ctx.lineTo(px + 14 * Math.cos(-pose.heading), py + 14 * Math.sin(-pose.heading));
        ctx.strokeStyle = "#c8502d";
        ctx.lineWidth = 2;
        ctx.stroke();
        ctx.lineWidth = 1;
    }
}
function drawPlot(ctx, values, label, color) {
    const { width, height } = ctx.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#555";
    ctx.font = "11px monospace";
    ctx.fillText(label, 6, 12);
    if (values.length < 2) {
        return;
    }
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi - lo || 1;
    ctx.beginPath();
    values.forEach((v, i) => {
        const px = mapRange(i, 0, values.length - 1, 2, width - 2);
        const py = mapRange(v, lo - 0.05 * span, hi + 0.05 * span, height - 4, 16);
        i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.strokeStyle = color;
    ctx.stroke();
    ctx.fillText(hi.toFixed(2), width - 48, 12);
    ctx.fillText(lo.toFixed(2), width - 48, height - 4);
}

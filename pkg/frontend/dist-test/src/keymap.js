"use strict";
/** Keyboard-to-command mapping, pure and testable without a browser.
 *
 * Bindings:
 *   i / k        set linear velocity to +/- LINEAR_STEP * speed scale
 *   j / l        set angular velocity to +/- ANGULAR_STEP * speed scale
 *   space        zero twist
 *   q / z        speed scale x1.1 / x0.9 (re-sends the scaled twist)
 *   1..4         select a suspension motor (re-sends current motors)
 *   ArrowUp/Down nudge the selected motor by +/-0.1, clamped to [-1, 1]
 *   r            reset the episode
 *
 * Every bound key produces exactly one command; unbound keys produce none.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.MOTION_KEYS = exports.SCALE_DOWN = exports.SCALE_UP = exports.MOTOR_STEP = exports.ANGULAR_STEP = exports.LINEAR_STEP = void 0;
exports.initialControls = initialControls;
exports.keyToCommand = keyToCommand;
exports.LINEAR_STEP = 0.5; // m/s at scale 1
exports.ANGULAR_STEP = 1.0; // rad/s at scale 1
exports.MOTOR_STEP = 0.1;
exports.SCALE_UP = 1.1;
exports.SCALE_DOWN = 0.9;
/** Keys that command motion; releasing all of them sends a zero twist. */
exports.MOTION_KEYS = new Set(["i", "j", "k", "l"]);
function initialControls() {
    return { linear: 0, angular: 0, speedScale: 1.0,
        motors: [0, 0, 0, 0], selectedMotor: 0 };
}
function clampMotor(v) {
    return Math.max(-1, Math.min(1, v));
}
function twistOf(c) {
    return { kind: "twist", twist: { linear: c.linear, angular: c.angular } };
}
function suspensionOf(c) {
    return { kind: "suspension", motors: [...c.motors] };
}
function keyToCommand(key, controls) {
    const c = { ...controls, motors: [...controls.motors] };
    switch (key) {
        case "i":
            c.linear = exports.LINEAR_STEP * c.speedScale;
            return { command: twistOf(c), controls: c };
        case "k":
            c.linear = -exports.LINEAR_STEP * c.speedScale;
            return { command: twistOf(c), controls: c };
        case "j":
            c.angular = exports.ANGULAR_STEP * c.speedScale;
            return { command: twistOf(c), controls: c };
        case "l":
            c.angular = -exports.ANGULAR_STEP * c.speedScale;
            return { command: twistOf(c), controls: c };
        case " ":
            c.linear = 0;
            c.angular = 0;
            return { command: twistOf(c), controls: c };
        case "q":
        case "z": {
            const factor = key === "q" ? exports.SCALE_UP : exports.SCALE_DOWN;
            c.speedScale *= factor;
            c.linear *= factor;
            c.angular *= factor;
            return { command: twistOf(c), controls: c };
        }
        case "1":
        case "2":
        case "3":
        case "4":
            c.selectedMotor = Number(key) - 1;
            return { command: suspensionOf(c), controls: c };
        case "ArrowUp":
        case "ArrowDown": {
            const delta = key === "ArrowUp" ? exports.MOTOR_STEP : -exports.MOTOR_STEP;
            c.motors[c.selectedMotor] = clampMotor(c.motors[c.selectedMotor] + delta);
            return { command: suspensionOf(c), controls: c };
        }
        case "r":
            return { command: { kind: "reset" }, controls: c };
        default:
            return { command: null, controls };
    }
}

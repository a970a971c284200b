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

import { CommandMessage } from "./protocol.js";

export const LINEAR_STEP = 0.5;   // m/s at scale 1
export const ANGULAR_STEP = 1.0;  // rad/s at scale 1
export const MOTOR_STEP = 0.1;
export const SCALE_UP = 1.1;
export const SCALE_DOWN = 0.9;

/** Keys that command motion; releasing all of them sends a zero twist. */
export const MOTION_KEYS: ReadonlySet<string> = new Set(["i", "j", "k", "l"]);

export interface ControlState {
  linear: number;
  angular: number;
  speedScale: number;
  motors: [number, number, number, number];
  selectedMotor: number; // 0..3
}

export function initialControls(): ControlState {
  return { linear: 0, angular: 0, speedScale: 1.0,
           motors: [0, 0, 0, 0], selectedMotor: 0 };
}

export interface KeyResult {
  command: CommandMessage | null;
  controls: ControlState;
}

function clampMotor(v: number): number {
  return Math.max(-1, Math.min(1, v));
}

function twistOf(c: ControlState): CommandMessage {
  return { kind: "twist", twist: { linear: c.linear, angular: c.angular } };
}

function suspensionOf(c: ControlState): CommandMessage {
  return { kind: "suspension", motors: [...c.motors] };
}

export function keyToCommand(key: string, controls: ControlState): KeyResult {
  const c: ControlState = { ...controls, motors: [...controls.motors] };
  switch (key) {
    case "i":
      c.linear = LINEAR_STEP * c.speedScale;
      return { command: twistOf(c), controls: c };
    case "k":
      c.linear = -LINEAR_STEP * c.speedScale;
      return { command: twistOf(c), controls: c };
    case "j":
      c.angular = ANGULAR_STEP * c.speedScale;
      return { command: twistOf(c), controls: c };
    case "l":
      c.angular = -ANGULAR_STEP * c.speedScale;
      return { command: twistOf(c), controls: c };
    case " ":
      c.linear = 0;
      c.angular = 0;
      return { command: twistOf(c), controls: c };
    case "q":
    case "z": {
      const factor = key === "q" ? SCALE_UP : SCALE_DOWN;
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
      const delta = key === "ArrowUp" ? MOTOR_STEP : -MOTOR_STEP;
      c.motors[c.selectedMotor] = clampMotor(
        c.motors[c.selectedMotor] + delta);
      return { command: suspensionOf(c), controls: c };
    }
    case "r":
      return { command: { kind: "reset" }, controls: c };
    default:
      return { command: null, controls };
  }
}

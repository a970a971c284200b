/** Cockpit state: connection status, latest frame, command echo, and
 * fixed-capacity telemetry rings. Frames apply in tick order; duplicate
 * ticks are discarded; a backward tick jump is an episode restart and is
 * accepted (plots keep scrolling across episodes). */

import { CommandMessage, RenderFrame } from "./protocol.js";

export const RING_CAPACITY = 600;

export class RingBuffer {
  private data: number[] = [];
  constructor(readonly capacity: number = RING_CAPACITY) {}

  push(v: number): void {
    this.data.push(v);
    if (this.data.length > this.capacity) {
      this.data.shift();
    }
  }

  values(): readonly number[] {
    return this.data;
  }

  get length(): number {
    return this.data.length;
  }
}

export type ConnectionStatus = "connecting" | "open" | "disconnected";

export interface CockpitState {
  connection: ConnectionStatus;
  latestFrame: RenderFrame | null;
  lastTick: number;
  framesApplied: number;
  framesDiscarded: number;
  commandEcho: CommandMessage | null;
  pitch: RingBuffer;
  roll: RingBuffer;
  reward: RingBuffer;
  trace: { x: number; y: number }[];
}

export function newCockpitState(): CockpitState {
  return {
    connection: "connecting",
    latestFrame: null,
    lastTick: -1,
    framesApplied: 0,
    framesDiscarded: 0,
    commandEcho: null,
    pitch: new RingBuffer(),
    roll: new RingBuffer(),
    reward: new RingBuffer(),
    trace: [],
  };
}

/** Returns true when the frame was applied, false when discarded. */
export function applyFrame(state: CockpitState, frame: RenderFrame): boolean {
  if (frame.tick === state.lastTick) {
    state.framesDiscarded += 1;
    return false;
  }
  state.latestFrame = frame;
  state.lastTick = frame.tick;
  state.framesApplied += 1;
  state.pitch.push(frame.pose.pitch);
  state.roll.push(frame.pose.roll);
  state.reward.push(frame.reward);
  state.trace.push({ x: frame.pose.x, y: frame.pose.y });
  if (state.trace.length > RING_CAPACITY) {
    state.trace.shift();
  }
  return true;
}

export function setConnection(state: CockpitState,
                              status: ConnectionStatus): void {
  state.connection = status;
}

export function echoCommand(state: CockpitState, cmd: CommandMessage): void {
  state.commandEcho = cmd;
}

/** Wire types shared with the simulation service: outbound commands and
 * inbound telemetry frames. The frame schema mirrors the service exactly;
 * anything that is not a frame (acks, errors) parses to null. */

export interface Pose {
  x: number;
  y: number;
  heading: number;
  pitch: number;
  roll: number;
}

export interface LidarReading {
  height: number;
  distance: number;
}

export interface RenderFrame {
  tick: number;
  pose: Pose;
  suspension: number[];
  lidar: LidarReading;
  terrain_slice: number[];
  reward: number;
  done: boolean;
  termination: string | null;
}

export type CommandMessage =
  | { kind: "twist"; twist: { linear: number; angular: number } }
  | { kind: "suspension"; motors: [number, number, number, number] }
  | { kind: "reset" }
  | { kind: "stop" };

const FRAME_KEYS = ["tick", "pose", "suspension", "lidar", "terrain_slice",
  "reward", "done", "termination"] as const;

export function parseFrame(text: string): RenderFrame | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) {
    return null;
  }
  const obj = doc as Record<string, unknown>;
  for (const key of FRAME_KEYS) {
    if (!(key in obj)) {
      return null;
    }
  }
  if (typeof obj.tick !== "number" || !Array.isArray(obj.suspension)
    || !Array.isArray(obj.terrain_slice)) {
    return null;
  }
  return obj as unknown as RenderFrame;
}

export function serializeCommand(cmd: CommandMessage): string {
  return JSON.stringify(cmd);
}

"use strict";
/** Wire types shared with the simulation service: outbound commands and
 * inbound telemetry frames. The frame schema mirrors the service exactly;
 * anything that is not a frame (acks, errors) parses to null. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.parseFrame = parseFrame;
exports.serializeCommand = serializeCommand;
const FRAME_KEYS = ["tick", "pose", "suspension", "lidar", "terrain_slice",
    "reward", "done", "termination"];
function parseFrame(text) {
    let doc;
    try {
        doc = JSON.parse(text);
    }
    catch {
        return null;
    }
    if (typeof doc !== "object" || doc === null) {
        return null;
    }
    const obj = doc;
    for (const key of FRAME_KEYS) {
        if (!(key in obj)) {
            return null;
        }
    }
    if (typeof obj.tick !== "number" || !Array.isArray(obj.suspension)
        || !Array.isArray(obj.terrain_slice)) {
        return null;
    }
    return obj;
}
function serializeCommand(cmd) {
    return JSON.stringify(cmd);
}

"use strict";
var __importDefault = (this && this.__importDefault) || function (mod) {
    return (mod && mod.__esModule) ? mod : { "default": mod };
};
Object.defineProperty(exports, "__esModule", { value: true });
const strict_1 = __importDefault(require("node:assert/strict"));
const node_test_1 = require("node:test");
const protocol_js_1 = require("../src/protocol.js");
const FRAME_JSON = JSON.stringify({
    tick: 42,
    pose: { x: 1.5, y: 0.0, heading: 0.1, pitch: 0.02, roll: -0.01 },
    suspension: [0.1, 0.1, 0.0, 0.0],
    lidar: { height: 0.2, distance: 1.5 },
    terrain_slice: [0, 0, 0.2],
    reward: 0.3,
    done: false,
    termination: null,
});
(0, node_test_1.test)("frame parses and round-trips every schema field", () => {
    const frame = (0, protocol_js_1.parseFrame)(FRAME_JSON);
    strict_1.default.ok(frame);
    strict_1.default.equal(frame.tick, 42);
    strict_1.default.equal(frame.pose.pitch, 0.02);
    strict_1.default.equal(frame.lidar.distance, 1.5);
    strict_1.default.equal(frame.termination, null);
    strict_1.default.deepEqual(JSON.parse(JSON.stringify(frame)), JSON.parse(FRAME_JSON));
});
(0, node_test_1.test)("acks and errors are not frames", () => {
    strict_1.default.equal((0, protocol_js_1.parseFrame)('{"ok": "twist"}'), null);
    strict_1.default.equal((0, protocol_js_1.parseFrame)('{"error": "bad_command"}'), null);
    strict_1.default.equal((0, protocol_js_1.parseFrame)("definitely not json"), null);
    strict_1.default.equal((0, protocol_js_1.parseFrame)("3.5"), null);
});
(0, node_test_1.test)("commands serialize to the service schema", () => {
    strict_1.default.deepEqual(JSON.parse((0, protocol_js_1.serializeCommand)({ kind: "twist", twist: { linear: 1, angular: -0.5 } })), { kind: "twist", twist: { linear: 1, angular: -0.5 } });
    strict_1.default.deepEqual(JSON.parse((0, protocol_js_1.serializeCommand)({ kind: "suspension", motors: [0.1, 0.2, 0.3, 0.4] })), { kind: "suspension", motors: [0.1, 0.2, 0.3, 0.4] });
    strict_1.default.deepEqual(JSON.parse((0, protocol_js_1.serializeCommand)({ kind: "reset" })), { kind: "reset" });
});

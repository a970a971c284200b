"use strict";
/** Cockpit state: connection status, latest frame, command echo, and
 * fixed-capacity telemetry rings. Frames apply in tick order; duplicate
 * ticks are discarded; a backward tick jump is an episode restart and is
 * accepted (plots keep scrolling across episodes). */
Object.defineProperty(exports, "__esModule", { value: true });
exports.RingBuffer = exports.RING_CAPACITY = void 0;
exports.newCockpitState = newCockpitState;
exports.applyFrame = applyFrame;
exports.setConnection = setConnection;
exports.echoCommand = echoCommand;
exports.RING_CAPACITY = 600;
class RingBuffer {
    constructor(capacity = exports.RING_CAPACITY) {
        this.capacity = capacity;
        this.data = [];
    }
    push(v) {
        this.data.push(v);
        if (this.data.length > this.capacity) {
            this.data.shift();
        }
    }
    values() {
        return this.data;
    }
    get length() {
        return this.data.length;
    }
}
exports.RingBuffer = RingBuffer;
function newCockpitState() {
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
function applyFrame(state, frame) {
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
    if (state.trace.length > exports.RING_CAPACITY) {
        state.trace.shift();
    }
    return true;
}
function setConnection(state, status) {
    state.connection = status;
}
function echoCommand(state, cmd) {
    state.commandEcho = cmd;
}

import assert from "node:assert/strict";
import { test } from "node:test";

import { RenderFrame } from "../src/protocol.js";
import { applyFrame, newCockpitState, RING_CAPACITY, RingBuffer,
  setConnection } from "../src/state.js";

function frame(tick: number, x = 0): RenderFrame {
  return {
    tick,
    pose: { x, y: 0, heading: 0, pitch: 0.01 * tick, roll: 0 },
    suspension: [0, 0, 0, 0],
    lidar: { height: 0, distance: 5 },
    terrain_slice: [0, 0, 0],
    reward: 1,
    done: false,
    termination: null,
  };
}

test("ring buffer holds exactly the newest values", () => {
  const ring = new RingBuffer(5);
  for (let i = 0; i < 12; i++) {
    ring.push(i);
  }
  assert.equal(ring.length, 5);
  assert.deepEqual([...ring.values()], [7, 8, 9, 10, 11]);
});

test("telemetry rings never exceed capacity", () => {
  const state = newCockpitState();
  for (let t = 1; t <= RING_CAPACITY + 150; t++) {
    applyFrame(state, frame(t));
  }
  assert.equal(state.pitch.length, RING_CAPACITY);
  assert.equal(state.roll.length, RING_CAPACITY);
  assert.equal(state.reward.length, RING_CAPACITY);
  assert.equal(state.trace.length, RING_CAPACITY);
});

test("duplicate ticks are discarded", () => {
  const state = newCockpitState();
  assert.equal(applyFrame(state, frame(5)), true);
  assert.equal(applyFrame(state, frame(5)), false);
  assert.equal(state.framesApplied, 1);
  assert.equal(state.framesDiscarded, 1);
});

test("frames apply in tick order", () => {
  const state = newCockpitState();
  for (const t of [1, 2, 3, 7, 8]) {
    assert.equal(applyFrame(state, frame(t)), true);
  }
  assert.equal(state.lastTick, 8);
});

test("episode restart (backward tick) is accepted and keeps plots", () => {
  const state = newCockpitState();
  applyFrame(state, frame(100));
  applyFrame(state, frame(101));
  assert.equal(applyFrame(state, frame(1)), true); // new episode
  assert.equal(state.lastTick, 1);
  assert.equal(state.pitch.length, 3);
});

test("latest frame replaces older ones", () => {
  const state = newCockpitState();
  applyFrame(state, frame(1, 0.5));
  applyFrame(state, frame(2, 0.75));
  assert.equal(state.latestFrame?.pose.x, 0.75);
});

test("connection transitions", () => {
  const state = newCockpitState();
  assert.equal(state.connection, "connecting");
  setConnection(state, "open");
  assert.equal(state.connection, "open");
  setConnection(state, "disconnected");
  assert.equal(state.connection, "disconnected");
});

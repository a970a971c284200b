/** Cockpit wiring: keyboard capture with 10 Hz held-key repeat, the
 * WebSocket session, and the render loop. */

import { ControlState, initialControls, keyToCommand, MOTION_KEYS }
  from "./keymap.js";
import { CockpitSocket } from "./net.js";
import { applyFrame, echoCommand, newCockpitState, setConnection }
  from "./state.js";
import { drawPlot, drawSideView, drawTopView } from "./render.js";

const REPEAT_MS = 100; // held keys re-send at 10 Hz

function sessionUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/session/main`;
}

function ctx2d(id: string): CanvasRenderingContext2D {
  const canvas = document.getElementById(id) as HTMLCanvasElement;
  return canvas.getContext("2d")!;
}

function start(): void {
  const state = newCockpitState();
  let controls: ControlState = initialControls();
  const held = new Set<string>();

  const banner = document.getElementById("banner")!;
  const echo = document.getElementById("echo")!;
  const side = ctx2d("side");
  const top = ctx2d("top");
  const pitchPlot = ctx2d("plot-pitch");
  const rollPlot = ctx2d("plot-roll");
  const rewardPlot = ctx2d("plot-reward");

  const socket = new CockpitSocket(sessionUrl(), {
    onFrame(frame) {
      applyFrame(state, frame);
    },
    onStatus(status) {
      setConnection(state, status);
      banner.textContent = status === "open" ? ""
        : status === "connecting" ? "connecting..."
        : "disconnected - retrying";
      banner.className = status === "open" ? "banner hidden" : "banner";
    },
  });
  socket.connect();

  function press(key: string): void {
    const result = keyToCommand(key, controls);
    controls = result.controls;
    if (result.command !== null) {
      socket.send(result.command);
      echoCommand(state, result.command);
      echo.textContent = JSON.stringify(result.command);
    }
  }

  document.addEventListener("keydown", (event) => {
    if (event.repeat) {
      return; // our own 10 Hz repeat below
    }
    if (MOTION_KEYS.has(event.key)) {
      held.add(event.key);
    }
    press(event.key);
  });

  document.addEventListener("keyup", (event) => {
    if (MOTION_KEYS.has(event.key)) {
      held.delete(event.key);
      if (held.size === 0) {
        press(" "); // releasing all motion keys sends a zero twist
      }
    }
  });

  setInterval(() => {
    for (const key of held) {
      press(key); // constant re-publish while held
    }
  }, REPEAT_MS);

  function renderLoop(): void {
    drawSideView(side, state);
    drawTopView(top, state);
    drawPlot(pitchPlot, state.pitch.values(), "pitch (rad)", "#2d7dc8");
    drawPlot(rollPlot, state.roll.values(), "roll (rad)", "#c87d2d");
    drawPlot(rewardPlot, state.reward.values(), "reward", "#2dc87d");
    requestAnimationFrame(renderLoop);
  }
  requestAnimationFrame(renderLoop);
}

window.addEventListener("DOMContentLoaded", start);

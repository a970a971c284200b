"use strict";
/** Cockpit wiring: keyboard capture with 10 Hz held-key repeat, the
 * WebSocket session, and the render loop. */
Object.defineProperty(exports, "__esModule", { value: true });
const keymap_js_1 = require("./keymap.js");
const net_js_1 = require("./net.js");
const state_js_1 = require("./state.js");
const render_js_1 = require("./render.js");
const REPEAT_MS = 100; // held keys re-send at 10 Hz
function sessionUrl() {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    return `${proto}://${location.host}/session/main`;
}
function ctx2d(id) {
    const canvas = document.getElementById(id);
    return canvas.getContext("2d");
}
function start() {
    const state = (0, state_js_1.newCockpitState)();
    let controls = (0, keymap_js_1.initialControls)();
    const held = new Set();
    const banner = document.getElementById("banner");
    const echo = document.getElementById("echo");
    const side = ctx2d("side");
    const top = ctx2d("top");
    const pitchPlot = ctx2d("plot-pitch");
    const rollPlot = ctx2d("plot-roll");
    const rewardPlot = ctx2d("plot-reward");
    const socket = new net_js_1.CockpitSocket(sessionUrl(), {
        onFrame(frame) {
            (0, state_js_1.applyFrame)(state, frame);
        },
        onStatus(status) {
            (0, state_js_1.setConnection)(state, status);
            banner.textContent = status === "open" ? ""
                : status === "connecting" ? "connecting..."
                    : "disconnected - retrying";
            banner.className = status === "open" ? "banner hidden" : "banner";
        },
    });
    socket.connect();
    function press(key) {
        const result = (0, keymap_js_1.keyToCommand)(key, controls);
        controls = result.controls;
        if (result.command !== null) {
            socket.send(result.command);
            (0, state_js_1.echoCommand)(state, result.command);
            echo.textContent = JSON.stringify(result.command);
        }
    }
    document.addEventListener("keydown", (event) => {
        if (event.repeat) {
            return; // our own 10 Hz repeat below
        }
        if (keymap_js_1.MOTION_KEYS.has(event.key)) {
            held.add(event.key);
        }
        press(event.key);
    });
    document.addEventListener("keyup", (event) => {
        if (keymap_js_1.MOTION_KEYS.has(event.key)) {
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
    function renderLoop() {
        (0, render_js_1.drawSideView)(side, state);
        (0, render_js_1.drawTopView)(top, state);
        (0, render_js_1.drawPlot)(pitchPlot, state.pitch.values(), "pitch (rad)", "#2d7dc8");
        (0, render_js_1.drawPlot)(rollPlot, state.roll.values(), "roll (rad)", "#c87d2d");
        (0, render_js_1.drawPlot)(rewardPlot, state.reward.values(), "reward", "#2dc87d");
        requestAnimationFrame(renderLoop);
    }
    requestAnimationFrame(renderLoop);
}
window.addEventListener("DOMContentLoaded", start);

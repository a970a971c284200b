"use strict";
/** WebSocket client with automatic retry. Disconnection is surfaced
 * immediately (the UI shows a banner); a retry fires every second until the
 * service is reachable again. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.CockpitSocket = exports.RETRY_MS = void 0;
const protocol_js_1 = require("./protocol.js");
exports.RETRY_MS = 1000;
class CockpitSocket {
    constructor(url, handlers) {
        this.url = url;
        this.handlers = handlers;
        this.ws = null;
        this.retryTimer = null;
        this.closed = false;
    }
    connect() {
        this.handlers.onStatus("connecting");
        this.ws = new WebSocket(this.url);
        this.ws.onopen = () => this.handlers.onStatus("open");
        this.ws.onmessage = (event) => {
            const frame = (0, protocol_js_1.parseFrame)(String(event.data));
            if (frame !== null) {
                this.handlers.onFrame(frame);
            }
        };
        this.ws.onclose = () => this.dropped();
        this.ws.onerror = () => { };
    }
    dropped() {
        if (this.closed) {
            return;
        }
        this.handlers.onStatus("disconnected");
        if (this.retryTimer === null) {
            this.retryTimer = setTimeout(() => {
                this.retryTimer = null;
                if (!this.closed) {
                    this.connect();
                }
            }, exports.RETRY_MS);
        }
    }
    send(cmd) {
        if (this.ws !== null && this.ws.readyState === 1 /* OPEN */) {
            this.ws.send((0, protocol_js_1.serializeCommand)(cmd));
            return true;
        }
        return false;
    }
    close() {
        this.closed = true;
        if (this.retryTimer !== null) {
            clearTimeout(this.retryTimer);
        }
        this.ws?.close();
    }
}
exports.CockpitSocket = CockpitSocket;

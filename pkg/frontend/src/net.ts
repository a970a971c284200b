/** WebSocket client with automatic retry. Disconnection is surfaced
 * immediately (the UI shows a banner); a retry fires every second until the
 * service is reachable again. */

import { CommandMessage, RenderFrame, parseFrame, serializeCommand }
  from "./protocol.js";

export interface SocketHandlers {
  onFrame(frame: RenderFrame): void;
  onStatus(status: "connecting" | "open" | "disconnected"): void;
}

export const RETRY_MS = 1000;

export class CockpitSocket {
  private ws: WebSocket | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(private readonly url: string,
              private readonly handlers: SocketHandlers) {}

  connect(): void {
    this.handlers.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => this.handlers.onStatus("open");
    this.ws.onmessage = (event: MessageEvent) => {
      const frame = parseFrame(String(event.data));
      if (frame !== null) {
        this.handlers.onFrame(frame);
      }
    };
    this.ws.onclose = () => this.dropped();
    this.ws.onerror = () => { /* onclose follows */ };
  }

  private dropped(): void {
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
      }, RETRY_MS);
    }
  }

  send(cmd: CommandMessage): boolean {
    if (this.ws !== null && this.ws.readyState === 1 /* OPEN */) {
      this.ws.send(serializeCommand(cmd));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
    }
    this.ws?.close();
  }
}

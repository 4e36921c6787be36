// One ops WebSocket with exponential-backoff reconnect. Single event loop,
// single connection; callers see parsed messages and connect/disconnect
// edges.

import { backoffDelay } from "./backoff.js";
import type { OpsEvent, SnapshotMessage } from "./types.js";

export interface ConnectionHandlers {
  onSnapshot(snapshot: SnapshotMessage): void;
  onEvent(event: OpsEvent): void;
  onOpen(): void;
  onClose(): void;
}

export class OpsConnection {
  private socket: WebSocket | null = null;
  private attempt = 0;
  private closed = false;

  constructor(private url: string, private handlers: ConnectionHandlers) {}

  start(): void {
    this.connect();
  }

  stop(): void {
    this.closed = true;
    this.socket?.close();
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === WebSocket.OPEN;
  }

  send(message: object): boolean {
    if (!this.connected) return false;
    this.socket!.send(JSON.stringify(message));
    return true;
  }

  private connect(): void {
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempt = 0;
      this.handlers.onOpen();
    };
    socket.onmessage = (msg: MessageEvent) => {
      let doc: unknown;
      try {
        doc = JSON.parse(String(msg.data));
      } catch {
        return;
      }
      const ev = doc as OpsEvent;
      if (ev.type === "snapshot") {
        this.handlers.onSnapshot(doc as unknown as SnapshotMessage);
      } else {
        this.handlers.onEvent(ev);
      }
    };
    socket.onclose = () => {
      this.socket = null;
      this.handlers.onClose();
      if (!this.closed) {
        const delay = backoffDelay(this.attempt++);
        setTimeout(() => this.connect(), delay);
      }
    };
    socket.onerror = () => {
      socket.close();
    };
  }
}

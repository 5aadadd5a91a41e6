// Binds a screen to a socket. Works with the browser WebSocket and with
// any object offering `send(text)`.

import * as screen from "./screen.js";
import type { Screen, Step } from "./screen.js";
import { decode, encode, ProtocolError, type WireMessage } from "./wire.js";

export interface Socket {
  send(data: string): void;
}

export class Session {
  screen: Screen;
  /** Every inbound frame, in arrival order. */
  readonly log: WireMessage[] = [];
  readonly sent: WireMessage[] = [];
  private readonly listeners = new Set<(s: Screen, m: WireMessage | null) => void>();

  constructor(
    private readonly socket: Socket,
    start: Screen,
  ) {
    this.screen = start;
  }

  onChange(f: (s: Screen, m: WireMessage | null) => void): () => void {
    this.listeners.add(f);
    return () => this.listeners.delete(f);
  }

  private apply(step: Step, inbound: WireMessage | null): void {
    this.screen = step.screen;
    for (const m of step.send) {
      this.sent.push(m);
      this.socket.send(encode(m));
    }
    for (const f of this.listeners) f(this.screen, inbound);
  }

  opened(): void {
    this.apply(screen.connected(this.screen), null);
  }

  closed(): void {
    this.apply({ screen: screen.connectionLost(this.screen), send: [] }, null);
  }

  /** One text frame from the server. */
  frame(text: string): void {
    let m: WireMessage;
    try {
      m = decode(text);
    } catch (e) {
      const why = e instanceof ProtocolError ? `${e.code}: ${e.message}` : String(e);
      this.apply({ screen: { ...this.screen, error: why }, send: [] }, null);
      return;
    }
    this.log.push(m);
    this.apply(screen.receive(this.screen, m), m);
  }

  click(viewId: string, key: string): void {
    this.apply(screen.click(this.screen, viewId, key), null);
  }

  addPane(viewId: string): void {
    this.apply(screen.addPane(this.screen, viewId), null);
  }

  removePane(viewId: string): void {
    this.apply(screen.removePane(this.screen, viewId), null);
  }

  movePane(viewId: string, index: number): void {
    this.apply(screen.movePane(this.screen, viewId, index), null);
  }

  setRole(role: string): void {
    this.apply(screen.setRole(this.screen, role), null);
  }
}

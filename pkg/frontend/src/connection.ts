/**
 * WebSocket envelope transport with fire-and-ack commands.
 *
 * Commands get monotonically increasing seq numbers; the returned promise
 * resolves with the matching reply payload. Events are delivered to the
 * caller in arrival order.
 */

import type { Envelope, ReplyPayload } from "./protocol.js";

export interface ConnectionHooks {
  onEvent: (envelope: Envelope) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
}

interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

type WebSocketCtor = new (url: string) => WebSocketLike;

export class Connection {
  private socket: WebSocketLike;
  private seq = 0;
  private pending = new Map<number, (reply: ReplyPayload) => void>();
  private openPromise: Promise<void>;

  constructor(
    url: string,
    private readonly hooks: ConnectionHooks,
    WebSocketImpl?: WebSocketCtor,
  ) {
    const Ctor =
      WebSocketImpl ?? ((globalThis as Record<string, unknown>).WebSocket as WebSocketCtor);
    this.hooks.onStatus?.("connecting");
    this.socket = new Ctor(url);
    this.openPromise = new Promise((resolve, reject) => {
      this.socket.onopen = () => {
        this.hooks.onStatus?.("open");
        resolve();
      };
      this.socket.onerror = (err) => reject(err);
    });
    this.socket.onmessage = (ev) => this.dispatch(String(ev.data));
    this.socket.onclose = () => {
      this.hooks.onStatus?.("closed");
      for (const resolve of this.pending.values()) {
        resolve({ ok: false, command: null, error: "ConnectionClosed" });
      }
      this.pending.clear();
    };
  }

  private dispatch(raw: string): void {
    const envelope = JSON.parse(raw) as Envelope;
    if (envelope.kind === "reply" && envelope.seq !== null) {
      const resolve = this.pending.get(envelope.seq);
      if (resolve) {
        this.pending.delete(envelope.seq);
        resolve(envelope.payload as unknown as ReplyPayload);
      }
      return;
    }
    this.hooks.onEvent(envelope);
  }

  ready(): Promise<void> {
    return this.openPromise;
  }

  send(payload: Record<string, unknown>): Promise<ReplyPayload> {
    this.seq += 1;
    const seq = this.seq;
    const envelope: Envelope = { seq, kind: "command", payload };
    return new Promise((resolve) => {
      this.pending.set(seq, resolve);
      this.socket.send(JSON.stringify(envelope));
    });
  }

  get pendingCount(): number {
    return this.pending.size;
  }

  close(): void {
    this.socket.close();
  }
}

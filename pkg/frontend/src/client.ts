/** Session client: seq-matched request/reply plus an ordered event stream.
 *
 * The websocket implementation is injected so the same client runs in the
 * browser (native WebSocket) and under node tests (the `ws` package).
 */

import type { Command, EngineEvent, Reply, SceneSnapshot, ServerFrame } from "./protocol.js";
import { isEventFrame } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

interface Pending {
  resolve: (reply: Reply) => void;
  reject: (err: Error) => void;
}

export class SessionClient {
  private socket: SocketLike | null = null;
  private seq = 0;
  private readonly pending = new Map<number, Pending>();
  private readonly eventListeners: Array<(ev: EngineEvent) => void> = [];
  private readonly closeListeners: Array<() => void> = [];

  constructor(
    private readonly url: string,
    private readonly factory: SocketFactory,
  ) {}

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = this.factory(this.url);
      socket.onopen = () => resolve();
      socket.onerror = () => reject(new Error(`cannot connect to ${this.url}`));
      socket.onmessage = (ev) => this.handleFrame(String(ev.data));
      socket.onclose = () => {
        for (const pending of this.pending.values()) {
          pending.reject(new Error("connection closed"));
        }
        this.pending.clear();
        for (const listener of this.closeListeners) listener();
      };
      this.socket = socket;
    });
  }

  close(): void {
    this.socket?.close();
  }

  onEvent(listener: (ev: EngineEvent) => void): void {
    this.eventListeners.push(listener);
  }

  onClose(listener: () => void): void {
    this.closeListeners.push(listener);
  }

  /** Send a command; resolves with the engine's reply (ok or error). */
  request(command: Command): Promise<Reply> {
    if (this.socket === null) {
      return Promise.reject(new Error("not connected"));
    }
    const seq = ++this.seq;
    const promise = new Promise<Reply>((resolve, reject) => {
      this.pending.set(seq, { resolve, reject });
    });
    this.socket.send(JSON.stringify({ seq, command }));
    return promise;
  }

  /** Request a command and fail loudly unless the engine accepted it. */
  async dispatch(command: Command): Promise<EngineEvent[]> {
    const reply = await this.request(command);
    if (!reply.ok) {
      throw new Error(`${reply.error?.code}: ${reply.error?.message}`);
    }
    return reply.events ?? [];
  }

  async snapshot(): Promise<SceneSnapshot> {
    const reply = await this.request({ op: "snapshot" });
    if (!reply.ok || reply.snapshot === undefined) {
      throw new Error("snapshot request failed");
    }
    return reply.snapshot;
  }

  async reopen(mode: "unified" | "separated"): Promise<SceneSnapshot> {
    const reply = await this.request({ op: "reopen", mode });
    if (!reply.ok || reply.snapshot === undefined) {
      throw new Error("reopen request failed");
    }
    return reply.snapshot;
  }

  private handleFrame(raw: string): void {
    const frame = JSON.parse(raw) as ServerFrame;
    if (isEventFrame(frame)) {
      for (const listener of this.eventListeners) listener(frame.event);
      return;
    }
    const pending = this.pending.get(frame.seq);
    if (pending !== undefined) {
      this.pending.delete(frame.seq);
      pending.resolve(frame);
    }
  }
}

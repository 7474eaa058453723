// Session client: WebSocket transport, version handshake, reconnect with
// exponential backoff, stale-message filtering via the shared view state.

import { PROTOCOL_VERSION, parseServerMsg, serialize } from "./protocol";
import type { ClientMsg, ServerMsg, SubjectResponse } from "./protocol";
import { applyMessage, initialView, recordResponse } from "./view";
import type { ViewState } from "./view";

// Structural WebSocket so browser sockets and the `ws` package both fit.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  readyState: number;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;

export interface ClientOptions {
  maxBackoffMs?: number;
  baseBackoffMs?: number;
  onChange?: (view: ViewState) => void;
  onMessage?: (msg: ServerMsg) => void;
}

export class SessionClient {
  readonly view: ViewState = initialView();
  private socket: SocketLike | null = null;
  private seq = 0;
  private attempts = 0;
  private closed = false;
  private handshook = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private lastInputSentMs = 0;

  constructor(
    private url: string,
    private makeSocket: SocketFactory,
    private options: ClientOptions = {},
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    this.handshook = false;
    this.view.connection = this.attempts === 0 ? "connecting" : "reconnecting";
    this.notify();
    const socket = this.makeSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      // Server speaks first; we answer its hello in onmessage.
    };
    socket.onmessage = (ev) => this.handleLine(String(ev.data));
    socket.onerror = () => {
      // close handler manages retries
    };
    socket.onclose = () => {
      if (this.closed || this.view.connection === "refused") return;
      this.view.connection = "reconnecting";
      this.view.banner = "connection lost — retrying";
      this.notify();
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    const base = this.options.baseBackoffMs ?? 250;
    const cap = this.options.maxBackoffMs ?? 10_000;
    const delay = Math.min(base * 2 ** this.attempts, cap);
    this.attempts += 1;
    this.reconnectTimer = setTimeout(() => this.open(), delay);
  }

  private handleLine(line: string): void {
    const msg = parseServerMsg(line);
    if (!msg) return;
    if (msg.type === "hello" && !this.handshook) {
      if (msg.version !== PROTOCOL_VERSION) {
        this.view.connection = "refused";
        this.view.banner = `server protocol ${msg.version}, console speaks ${PROTOCOL_VERSION}`;
        this.notify();
        this.socket?.close();
        return;
      }
      this.handshook = true;
      this.attempts = 0;
      this.sendRaw({ type: "hello", version: PROTOCOL_VERSION });
      this.view.connection = "connected";
      this.view.banner = null;
    }
    applyMessage(this.view, msg);
    this.options.onMessage?.(msg);
    this.notify();
  }

  private notify(): void {
    this.options.onChange?.(this.view);
  }

  private sendRaw(msg: ClientMsg): number {
    this.seq += 1;
    const stamped = { ...msg, seq: this.seq };
    if (this.socket && this.socket.readyState === OPEN) {
      this.socket.send(serialize(stamped));
    }
    return this.seq;
  }

  start(): void {
    this.sendRaw({ type: "control", action: "start" });
  }

  pause(): void {
    this.sendRaw({ type: "control", action: "pause" });
  }

  abort(): void {
    this.sendRaw({ type: "control", action: "abort" });
  }

  /**
   * Stream a fingertip position, rate-limited to the service tick rate so a
   * fast pointer cannot flood the loop. Returns true when actually sent.
   */
  sendFinger(pos: [number, number, number], nowMs?: number): boolean {
    const now = nowMs ?? Date.now();
    const minInterval = 1000 / this.view.tickRateHz;
    if (now - this.lastInputSentMs < minInterval) return false;
    this.lastInputSentMs = now;
    this.sendRaw({ type: "finger_input", pos });
    return true;
  }

  /** Answer the current probe; exactly one response per probe id. */
  respond(probeId: number, response: SubjectResponse): boolean {
    if (!recordResponse(this.view, probeId, response)) return false;
    this.sendRaw({ type: "calibration_response", probe_id: probeId, response });
    this.notify();
    return true;
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.socket?.close();
  }
}

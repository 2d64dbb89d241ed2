// Reconnecting session client. Owns the transport lifecycle and the view:
// every decoded message (inbound or our own outgoing, which the view also
// needs) flows through the reducer, and listeners get the updated view.

import { decode, encode, msgHello, type WireMessage } from "./wire.js";
import {
  applyMessage,
  initialView,
  type ConnectionState,
  type SessionView,
} from "./view.js";
import type { LineTransport, TransportFactory } from "./transport.js";

export const RECONNECT_MS = 2000;

export type ViewListener = (view: SessionView) => void;
export type MessageListener = (msg: WireMessage, receivedAtMs: number) => void;

export class UiClient {
  view: SessionView = initialView();
  onView: ViewListener | null = null;
  onMessage: MessageListener | null = null;

  private transport: LineTransport | null = null;
  private closed = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly makeTransport: TransportFactory,
    private readonly now: () => number = Date.now,
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const t = this.makeTransport();
    this.transport = t;
    this.setConnection("connecting");
    t.onOpen = () => {
      this.setConnection("connected");
      this.send(msgHello(this.now()));
    };
    t.onLine = (line) => {
      const at = this.now(); // receipt time, before any parsing work
      let msg: WireMessage;
      try {
        msg = decode(line);
      } catch {
        return; // garbage on the wire never takes the UI down
      }
      this.view = applyMessage(this.view, msg, at);
      this.onMessage?.(msg, at);
      this.onView?.(this.view);
    };
    t.onClose = () => {
      this.setConnection("disconnected");
      if (!this.closed) {
        this.retryTimer = setTimeout(() => this.open(), RECONNECT_MS);
      }
    };
  }

  /** Encode, transmit, and fold our own message into the view. */
  send(msg: WireMessage): void {
    this.transport?.send(encode(msg));
    this.view = applyMessage(this.view, msg, this.now());
    this.onView?.(this.view);
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.transport?.close();
  }

  private setConnection(state: ConnectionState): void {
    this.view = { ...this.view, connection: state };
    this.onView?.(this.view);
  }
}

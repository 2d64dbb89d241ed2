// Node TCP transport: lets the vitest suite (and any headless tooling)
// speak to the real server over its native stream socket.

import * as net from "node:net";

import { LineSplitter, type LineTransport } from "./transport.js";

export class TcpTransport implements LineTransport {
  onLine: ((line: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;
  private readonly socket: net.Socket;
  private readonly splitter = new LineSplitter((l) => this.onLine?.(l));

  constructor(host: string, port: number) {
    this.socket = net.connect({ host, port });
    this.socket.setEncoding("utf-8");
    this.socket.on("connect", () => this.onOpen?.());
    this.socket.on("close", () => this.onClose?.());
    this.socket.on("error", () => {}); // close fires afterwards
    this.socket.on("data", (chunk: string) => this.splitter.push(chunk));
  }

  send(line: string): void {
    this.socket.write(line);
  }

  close(): void {
    this.socket.destroy();
  }
}

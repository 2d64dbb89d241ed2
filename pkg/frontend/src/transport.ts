// Transport abstraction: the client only needs a line stream. The browser
// build plugs in a WebSocket; tests plug in a raw TCP socket so the same
// client code can be exercised against the real server under node.

export interface LineTransport {
  send(line: string): void;
  close(): void;
  onLine: ((line: string) => void) | null;
  onOpen: (() => void) | null;
  onClose: (() => void) | null;
}

export type TransportFactory = () => LineTransport;

/** Splits an arbitrary chunk stream into newline-terminated records. */
export class LineSplitter {
  private buffer = "";

  constructor(private readonly emit: (line: string) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx + 1);
      this.buffer = this.buffer.slice(idx + 1);
      this.emit(line);
    }
  }
}

export class WebSocketTransport implements LineTransport {
  onLine: ((line: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;
  private readonly ws: WebSocket;
  private readonly splitter = new LineSplitter((l) => this.onLine?.(l));

  constructor(url: string) {
    this.ws = new WebSocket(url);
    this.ws.addEventListener("open", () => this.onOpen?.());
    this.ws.addEventListener("close", () => this.onClose?.());
    this.ws.addEventListener("message", (ev) => this.splitter.push(String(ev.data)));
  }

  send(line: string): void {
    this.ws.send(line);
  }

  close(): void {
    this.ws.close();
  }
}

/**
 * JSON-lines client for the Python engine server.
 *
 * One server process per client; requests are answered strictly in order,
 * so a FIFO of pending promises is all the correlation needed.
 */

import { spawn, type ChildProcessByStdio } from "node:child_process";
import { createInterface, type Interface } from "node:readline";
import type { Readable, Writable } from "node:stream";
import { fileURLToPath } from "node:url";

export class BridgeError extends Error {
  constructor(
    message: string,
    readonly kind: string,
    readonly expected?: number[],
    readonly received?: number[],
  ) {
    super(message);
    this.name = "BridgeError";
  }
}

export interface EngineOptions {
  /** python interpreter; defaults to $VQCKIT_PYTHON or python3 */
  python?: string;
  /** engine server script; defaults to the copy shipped with this package */
  serverPath?: string;
}

interface Pending {
  resolve: (value: any) => void;
  reject: (err: Error) => void;
}

export class EngineClient {
  private child: ChildProcessByStdio<Writable, Readable, null>;
  private lines: Interface;
  private pending: Pending[] = [];
  private closed = false;
  private spawnError: Error | null = null;

  constructor(options: EngineOptions = {}) {
    const python = options.python ?? process.env.VQCKIT_PYTHON ?? "python3";
    const server =
      options.serverPath ??
      fileURLToPath(new URL("../server/engine_server.py", import.meta.url));
    this.child = spawn(python, [server], { stdio: ["pipe", "pipe", "inherit"] });
    this.child.on("error", (err) => {
      this.spawnError = err;
      this.failAll(err);
    });
    this.child.on("exit", (code) => {
      if (!this.closed) {
        this.failAll(new Error(`engine server exited with code ${code}`));
      }
    });
    this.lines = createInterface({ input: this.child.stdout });
    this.lines.on("line", (line) => this.onLine(line));
  }

  private failAll(err: Error): void {
    const waiting = this.pending;
    this.pending = [];
    for (const p of waiting) p.reject(err);
  }

  private onLine(line: string): void {
    const next = this.pending.shift();
    if (!next) return;
    let response: any;
    try {
      response = JSON.parse(line);
    } catch (err) {
      next.reject(new Error(`bad server response: ${line}`));
      return;
    }
    if (response.ok) {
      next.resolve(response);
    } else {
      const e = response.error ?? {};
      next.reject(
        new BridgeError(e.message ?? "engine error", e.type ?? "internal", e.expected, e.received),
      );
    }
  }

  private send(payload: Record<string, unknown>): Promise<any> {
    if (this.spawnError) return Promise.reject(this.spawnError);
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.child.stdin.write(JSON.stringify(payload) + "\n");
    });
  }

  request(payload: Record<string, unknown>): Promise<any> {
    if (this.closed) return Promise.reject(new Error("client is closed"));
    return this.send(payload);
  }

  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    try {
      await this.send({ op: "shutdown" });
    } catch {
      // server already gone
    }
    this.child.stdin.end();
  }
}

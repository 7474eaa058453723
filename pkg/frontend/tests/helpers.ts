// Shared test plumbing: spawn the Python session service and build clients
// backed by the `ws` package instead of the browser WebSocket.

import { type ChildProcess, spawn } from "node:child_process";
import { createServer } from "node:net";
import WebSocket from "ws";

import { SessionClient, type ClientOptions, type SocketLike } from "../src/client";

export function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      const port = address.port;
      srv.close(() => resolve(port));
    });
  });
}

export interface Service {
  proc: ChildProcess;
  tcpPort: number;
  httpPort: number;
  wsUrl: string;
  stop(): void;
}

export async function startService(args: string[]): Promise<Service> {
  const tcpPort = await freePort();
  const httpPort = await freePort();
  const proc = spawn(
    "python3",
    [
      "-m",
      "electrotactile.cli",
      "serve",
      "--port",
      String(tcpPort),
      "--http-port",
      String(httpPort),
      ...args,
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk) => (stderr += String(chunk)));
  proc.on("exit", (code) => {
    if (code !== null && code !== 0) {
      console.error(`service exited ${code}: ${stderr}`);
    }
  });

  const wsUrl = `ws://127.0.0.1:${httpPort}/ws`;
  await waitForWs(wsUrl, 15_000);
  return {
    proc,
    tcpPort,
    httpPort,
    wsUrl,
    stop() {
      proc.kill("SIGTERM");
    },
  };
}

async function waitForWs(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      await new Promise<void>((resolve, reject) => {
        const ws = new WebSocket(url);
        ws.once("open", () => {
          ws.close();
          resolve();
        });
        ws.once("error", reject);
      });
      return;
    } catch (err) {
      lastError = err;
      await sleep(150);
    }
  }
  throw new Error(`service not reachable at ${url}: ${lastError}`);
}

export function nodeSocketFactory(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}

export function makeClient(url: string, options: ClientOptions = {}): SessionClient {
  return new SessionClient(url, nodeSocketFactory, options);
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export async function until(
  predicate: () => boolean,
  timeoutMs = 20_000,
  what = "condition",
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await sleep(5);
  }
  throw new Error(`timed out waiting for ${what}`);
}

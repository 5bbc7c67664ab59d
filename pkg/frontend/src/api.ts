// Thin /v1 client. Works in the browser and under node 20 (global fetch);
// the stream reader speaks server-sent events directly so resume can pass
// an explicit ?since index.

import type { Injection, Snapshot, StreamEvent } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(body)}`);
  }
}

async function call<T>(method: string, url: string, body?: unknown): Promise<T> {
  const resp = await fetch(url, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const data = await resp.json().catch(() => null);
  if (!resp.ok) throw new ApiError(resp.status, data);
  return data as T;
}

export interface CreateResponse {
  id: string;
  stream: string;
  snapshot: Snapshot;
}

export function createSession(
  base: string,
  opts: { source?: string; policy?: string; seed?: number } = {},
): Promise<CreateResponse> {
  return call("POST", `${base}/sessions`, opts);
}

export function getState(base: string, sid: string): Promise<Snapshot> {
  return call("GET", `${base}/sessions/${sid}/state`);
}

export function step(base: string, sid: string, count: number): Promise<Snapshot> {
  return call("POST", `${base}/sessions/${sid}/step`, { count });
}

export function inject(
  base: string,
  sid: string,
  injection: Injection,
): Promise<{ accepted: true; queued: number }> {
  return call("POST", `${base}/sessions/${sid}/inject`, injection);
}

/** Parse one SSE frame (the lines between blank separators). */
function parseFrame(frame: string): StreamEvent | null {
  let id = -1;
  let kind = "";
  let data = "";
  for (const line of frame.split("\n")) {
    if (line.startsWith("id: ")) id = Number(line.slice(4));
    else if (line.startsWith("event: ")) kind = line.slice(7);
    else if (line.startsWith("data: ")) data = line.slice(6);
    // lines starting with ":" are keep-alive comments
  }
  if (id < 0 || !kind || !data) return null;
  return { id, kind, data: JSON.parse(data) } as StreamEvent;
}

/**
 * Follow a session's event stream from `since` (exclusive). Yields events
 * until the server closes the connection or `signal` aborts.
 */
export async function* streamEvents(
  base: string,
  sid: string,
  since: number,
  signal?: AbortSignal,
): AsyncGenerator<StreamEvent> {
  const resp = await fetch(`${base}/sessions/${sid}/stream?since=${since}`, {
    headers: { Accept: "text/event-stream" },
    signal,
  });
  if (!resp.ok || !resp.body) throw new ApiError(resp.status, await resp.text());
  const reader = resp.body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (;;) {
    const { done, value } = await reader.read();
    if (done) return;
    buffer += decoder.decode(value, { stream: true });
    let sep;
    while ((sep = buffer.indexOf("\n\n")) >= 0) {
      const frame = buffer.slice(0, sep);
      buffer = buffer.slice(sep + 2);
      const ev = parseFrame(frame);
      if (ev) yield ev;
    }
  }
}

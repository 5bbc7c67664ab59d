// Browser wiring: one session, one rendering loop over the ordered stream,
// API calls serialized through a single pending slot. Reconnects resume
// from the last applied event index, so no event is applied twice.

import { createSession, getState, inject, step, streamEvents, ApiError } from "./api.js";
import { acknowledge, initialState, reduce, type State } from "./store.js";
import { render, type UiFlags } from "./render.js";

const base = `${location.origin}/v1`;
const app = document.getElementById("app") as HTMLElement;

let state: State;
let ui: UiFlags = { connected: true };

function paint() {
  app.innerHTML = render(state, ui);
}

async function guarded(label: string, fn: () => Promise<unknown>) {
  if (ui.pending) return;
  ui = { ...ui, pending: label, error: undefined };
  paint();
  try {
    await fn();
  } catch (e) {
    ui.error = e instanceof ApiError ? e.message : String(e);
  }
  ui.pending = undefined;
  paint();
}

app.addEventListener("click", (e) => {
  const t = e.target as HTMLElement;
  const ack = t.getAttribute("data-ack");
  if (ack !== null) {
    const seq = Number(ack);
    state = acknowledge(state, seq);
    paint();
    // record the acknowledgement in the session journal as a marker
    void inject(base, state.session, { op: "marker", note: `ack attention ${seq}` }).catch(() => {});
    return;
  }
  const n = t.getAttribute("data-step");
  if (n !== null) void guarded(`stepping ${n}`, () => step(base, state.session, Number(n)));
});

app.addEventListener("submit", (e) => {
  const form = e.target as HTMLFormElement;
  if (!form.hasAttribute("data-inject-form")) return;
  e.preventDefault();
  const data = new FormData(form);
  const op = String(data.get("op"));
  const atom = String(data.get("atom") ?? "").trim();
  const identifier = String(data.get("identifier") ?? "").trim();
  const injection =
    op === "post-event"
      ? ({ op, event: atom, identifier } as const)
      : ({ op: op as "add-belief" | "remove-belief", atom } as const);
  void guarded(`injecting ${op} ${atom}`, () => inject(base, state.session, injection));
});

async function followStream() {
  for (;;) {
    try {
      ui.connected = true;
      paint();
      for await (const ev of streamEvents(base, state.session, state.lastSeq)) {
        state = reduce(state, ev);
        paint();
      }
    } catch {
      // fall through to retry
    }
    ui.connected = false;
    paint();
    await new Promise((r) => setTimeout(r, 1000));
  }
}

async function boot() {
  const sid = new URLSearchParams(location.search).get("session");
  if (sid) {
    state = initialState(await getState(base, sid));
  } else {
    const created = await createSession(base, { policy: "fifo" });
    history.replaceState(null, "", `?session=${created.id}`);
    state = initialState(created.snapshot);
  }
  paint();
  void followStream();
}

void boot();

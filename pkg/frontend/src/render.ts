// Render the whole view model to an HTML string. The page is re-rendered
// from scratch on every event; interactivity hooks are data- attributes
// that main.ts binds by delegation. Keeping this a pure State -> string
// function is what the replay tests lean on.

import type { State } from "./store.js";

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(x: number): string {
  return `${(x * 100).toFixed(1)}%`;
}

function progressBar(
  ratio: number | null,
  min: number | null,
  max: number | null,
  exact: string | null,
): string {
  const fill = ratio === null ? "" : `<div class="bar-fill" style="width:${pct(ratio)}"></div>`;
  let band = "";
  if (min !== null && max !== null && max > min) {
    band = `<div class="bar-band" style="left:${pct(min)};width:${pct(max - min)}"></div>`;
  }
  const label = exact === null ? "no estimate yet" : `${exact}${ratio === null ? "" : ` (${pct(ratio)})`}`;
  return `<div class="bar" role="progressbar">${fill}${band}</div><span class="bar-label">${esc(label)}</span>`;
}

function card(c: State["cards"][number]): string {
  const it = c.intention;
  const trace = it && it.trace.length ? it.trace.join(";") : "";
  return `<article class="card" data-identifier="${esc(c.identifier)}">
  <header>
    <span class="chip chip-${c.status}">${c.status}</span>
    <strong>${esc(c.identifier)}</strong>
    <span class="event-name">${esc(c.event)}</span>
  </header>
  ${it ? progressBar(it.ratio, it.ratio_min, it.ratio_max, it.ratio_exact) : progressBar(null, null, null, null)}
  ${trace ? `<div class="trace">trace: ${esc(trace)}</div>` : ""}
  ${it ? `<pre class="body">${esc(it.body)}</pre>` : `<div class="trace">intention finished</div>`}
</article>`;
}

function banners(state: State): string {
  if (!state.banners.length) return "";
  const items = state.banners
    .map(
      (b) => `<div class="banner" data-banner="${b.seq}">
  <span class="banner-text">attention: event <strong>${esc(b.event)}</strong>
  (${esc(b.identifier)}) raised at step ${b.step}</span>
  <button type="button" data-ack="${b.seq}">acknowledge</button>
</div>`,
    )
    .join("\n");
  return `<div class="banners">${items}</div>`;
}

export interface UiFlags {
  pending?: string; // description of the API call in flight
  error?: string; // last API error to surface inline
  connected?: boolean;
}

export function render(state: State, ui: UiFlags = {}): string {
  const changes = state.recentChanges
    .map((c) => `${esc(c.identifier)}: ${c.from ?? "new"} → ${c.to}`)
    .join(", ");
  return `${banners(state)}
<header class="top">
  <h1>canrt session ${esc(state.session)}</h1>
  <span class="meta">policy ${esc(state.policy)}, seed ${state.seed}, step ${state.step}</span>
  ${state.quiescent ? '<span class="chip chip-quiescent">quiescent</span>' : ""}
  ${ui.connected === false ? '<span class="chip chip-offline">reconnecting…</span>' : ""}
</header>
${ui.error ? `<div class="error">${esc(ui.error)}</div>` : ""}
${changes ? `<div class="changes">status: ${changes}</div>` : ""}
<section class="cards">
${state.cards.map(card).join("\n")}
</section>
<section class="beliefs">
  <h2>beliefs</h2>
  ${state.beliefs.length ? `<ul>${state.beliefs.map((b) => `<li>${esc(b)}</li>`).join("")}</ul>` : "<p>none</p>"}
</section>
<section class="controls">
  <button type="button" data-step="1" ${ui.pending ? "disabled" : ""}>step</button>
  <button type="button" data-step="10" ${ui.pending ? "disabled" : ""}>step 10</button>
  <form data-inject-form>
    <select name="op">
      <option value="add-belief">add belief</option>
      <option value="remove-belief">remove belief</option>
      <option value="post-event">post event</option>
    </select>
    <input name="atom" placeholder="atom / event" />
    <input name="identifier" placeholder="identifier (post-event)" />
    <button type="submit" ${ui.pending ? "disabled" : ""}>inject</button>
  </form>
  ${ui.pending ? `<span class="pending">${esc(ui.pending)}…</span>` : ""}
</section>`;
}

// Pure view-model state: a fold over the session's ordered event stream.
// No client-side agent semantics live here; every field is a projection of
// what the service sent. Purity is what makes reconnect-and-replay land on
// the identical state.

import type {
  AttentionData,
  IntentionRow,
  RecordRow,
  Snapshot,
  Status,
  StreamEvent,
} from "./types.js";

export interface Card {
  identifier: string;
  event: string;
  status: Status;
  intention: IntentionRow | null;
}

export interface Banner {
  seq: number; // stream event id, the exactly-once key
  step: number;
  event: string;
  identifier: string;
}

export interface State {
  session: string;
  policy: string;
  seed: number;
  step: number;
  quiescent: boolean;
  beliefs: string[];
  cards: Card[];
  banners: Banner[];
  acked: number[]; // banner seqs the operator has acknowledged
  recentChanges: { identifier: string; from: Status | null; to: Status }[];
  lastSeq: number;
}

function joinCards(records: RecordRow[], intentions: IntentionRow[]): Card[] {
  const byId = new Map(intentions.map((it) => [it.identifier, it]));
  return records
    .slice()
    .sort((a, b) => a.identifier.localeCompare(b.identifier))
    .map((r) => ({
      identifier: r.identifier,
      event: r.event,
      status: r.status,
      intention: byId.get(r.identifier) ?? null,
    }));
}

export function initialState(snapshot: Snapshot): State {
  return {
    session: snapshot.session,
    policy: snapshot.policy,
    seed: snapshot.seed,
    step: snapshot.step,
    quiescent: snapshot.quiescent,
    beliefs: snapshot.beliefs.slice().sort(),
    cards: joinCards(snapshot.records, snapshot.intentions),
    banners: [],
    acked: [],
    recentChanges: [],
    lastSeq: snapshot.last_event_seq,
  };
}

export function reduce(state: State, ev: StreamEvent): State {
  if (ev.id <= state.lastSeq) return state; // resume overlap: drop duplicates
  const next: State = { ...state, lastSeq: ev.id };
  switch (ev.kind) {
    case "step": {
      const d = ev.data;
      const beliefs = new Set(state.beliefs);
      for (const b of d.beliefs_removed) beliefs.delete(b);
      for (const b of d.beliefs_added) beliefs.add(b);
      next.beliefs = [...beliefs].sort();
      next.cards = joinCards(d.records, d.intentions);
      next.step = d.step + 1;
      next.quiescent = false;
      next.recentChanges = [];
      return next;
    }
    case "status-change":
      next.recentChanges = ev.data.changes;
      return next;
    case "attention": {
      const d: AttentionData = ev.data;
      if (state.banners.some((b) => b.seq === ev.id)) return next;
      next.banners = [
        ...state.banners,
        { seq: ev.id, step: d.step, event: d.event, identifier: d.identifier },
      ];
      return next;
    }
    case "quiescent":
      next.quiescent = true;
      return next;
  }
}

export function reduceAll(state: State, events: StreamEvent[]): State {
  return events.reduce(reduce, state);
}

/** Operator acknowledged a banner: drop it from the queue (idempotent). */
export function acknowledge(state: State, seq: number): State {
  if (!state.banners.some((b) => b.seq === seq)) return state;
  return {
    ...state,
    banners: state.banners.filter((b) => b.seq !== seq),
    acked: [...state.acked, seq],
  };
}

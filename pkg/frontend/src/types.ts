// Wire shapes of the /v1 API. Field names mirror the service's JSON schema.

export type Status = "pending" | "active" | "success" | "failure";

export interface RecordRow {
  event: string;
  identifier: string;
  status: Status;
}

export interface IntentionRow {
  identifier: string;
  root: string;
  body: string;
  trace: string[];
  ratio: number | null;
  ratio_min: number | null;
  ratio_max: number | null;
  ratio_exact: string | null;
}

export interface Snapshot {
  type: "snapshot";
  session: string;
  policy: string;
  seed: number;
  step: number;
  quiescent: boolean;
  beliefs: string[];
  records: RecordRow[];
  intentions: IntentionRow[];
  fired_motivations: string[];
  pending_injections: number;
  last_event_seq: number;
  applied?: number;
}

export interface StepEventData {
  type: "step";
  step: number;
  rule: string;
  subject: string;
  detail: string;
  beliefs_added: string[];
  beliefs_removed: string[];
  records: RecordRow[];
  intentions: IntentionRow[];
  attention: { event: string; identifier: string }[];
}

export interface StatusChangeData {
  step: number;
  changes: { identifier: string; from: Status | null; to: Status }[];
}

export interface AttentionData {
  step: number;
  event: string;
  identifier: string;
}

export interface QuiescentData {
  step: number;
}

export type StreamEvent =
  | { id: number; kind: "step"; data: StepEventData }
  | { id: number; kind: "status-change"; data: StatusChangeData }
  | { id: number; kind: "attention"; data: AttentionData }
  | { id: number; kind: "quiescent"; data: QuiescentData };

export type Injection =
  | { op: "add-belief"; atom: string }
  | { op: "remove-belief"; atom: string }
  | { op: "post-event"; event: string; identifier: string }
  | { op: "marker"; note: string };

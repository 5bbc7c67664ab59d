"""Interactive agent sessions over HTTP + JSON with a server-sent event feed.

Endpoints (all under /v1):

    POST /sessions                    create a session (inline source or the
                                      server's default agent; policy + seed)
    GET  /sessions/{id}/state         snapshot
    POST /sessions/{id}/step          {"count": n} drain injections, apply steps
    POST /sessions/{id}/inject        queue add-belief / remove-belief /
                                      post-event / marker
    GET  /sessions/{id}/stream        server-sent events: step, attention,
                                      status-change, quiescent; resumable via
                                      Last-Event-ID or ?since=

Each session is guarded by one lock: every request either sees the state
before or after any other, never between, and the optional journal records the
applied operations in that order. Injections queue without stepping and are
drained atomically at the start of the next step request.
"""

from __future__ import annotations

import json
import os
import re
import secrets
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from random import Random
from urllib.parse import parse_qs, urlparse

from .lang import CompiledAgent
from .parser import ParseError, ValidationError, parse_program
from .progress import compile_traces
from .semantics import (
    PENDING,
    AgentConfig,
    EventRecord,
    agent_successors,
    initial_config,
)
from . import report


class BadRequest(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


class Session:
    def __init__(
        self,
        sid: str,
        source: str,
        policy: str,
        seed: int,
        journal_path: str | None = None,
    ):
        self.id = sid
        self.agent: CompiledAgent = parse_program(source, f"<session {sid}>")
        self.table = compile_traces(self.agent)
        self.policy = policy
        self.seed = seed
        self.rng = Random(seed)
        self.cfg: AgentConfig = initial_config(self.agent)
        self.step_count = 0
        self.events: list[dict] = []  # the feed; entries carry "seq" and "event"
        self.injections: list[dict] = []
        self.lock = threading.Lock()
        self.changed = threading.Condition(self.lock)
        self._quiescent_announced = False
        self._journal = open(journal_path, "a", encoding="utf-8") if journal_path else None
        self._journal_write({"op": "create", "policy": policy, "seed": seed})

    # ── internals (call with self.lock held) ──────────────────────────

    def _journal_write(self, entry: dict) -> None:
        if self._journal is not None:
            self._journal.write(json.dumps(entry, sort_keys=True) + "\n")
            self._journal.flush()

    def _emit(self, event: str, data: dict) -> None:
        self.events.append({"seq": len(self.events), "event": event, "data": data})
        self.changed.notify_all()

    def _apply_injection(self, op: dict) -> None:
        kind = op["op"]
        if kind == "add-belief":
            self.cfg = AgentConfig(
                self.cfg.events,
                self.cfg.beliefs | {op["atom"]},
                self.cfg.intentions,
                self.cfg.fired_motivations,
            )
        elif kind == "remove-belief":
            self.cfg = AgentConfig(
                self.cfg.events,
                self.cfg.beliefs - {op["atom"]},
                self.cfg.intentions,
                self.cfg.fired_motivations,
            )
        elif kind == "post-event":
            record = EventRecord(op["event"], op["identifier"], PENDING)
            self.cfg = AgentConfig(
                self.cfg.events | {record},
                self.cfg.beliefs,
                self.cfg.intentions,
                self.cfg.fired_motivations,
            )
        elif kind == "marker":
            pass  # journal-only annotation, e.g. an attention acknowledgement
        else:  # pragma: no cover - validated on entry
            raise BadRequest(422, f"unknown injection op {kind!r}")
        self._quiescent_announced = False
        self._journal_write({"op": "inject", "injection": op})

    def _snapshot_locked(self) -> dict:
        return {
            "type": "snapshot",
            "session": self.id,
            "policy": self.policy,
            "seed": self.seed,
            "step": self.step_count,
            "quiescent": not agent_successors(self.agent, self.cfg),
            "beliefs": sorted(self.cfg.beliefs),
            "records": report.records_view(self.cfg),
            "intentions": report.intentions_view(self.cfg, self.table),
            "fired_motivations": sorted(self.cfg.fired_motivations),
            "pending_injections": len(self.injections),
            "last_event_seq": len(self.events) - 1,
        }

    # ── request-facing operations ─────────────────────────────────────

    def snapshot(self) -> dict:
        with self.lock:
            return self._snapshot_locked()

    def validate_injection(self, op: dict) -> None:
        """Raises BadRequest(409) for well-formed ops the agent cannot accept."""
        kind = op["op"]
        if kind in ("add-belief", "remove-belief"):
            if op["atom"] not in self.agent.atom_universe:
                raise BadRequest(409, f"atom {op['atom']!r} is not declared by this agent")
        elif kind == "post-event":
            if op["event"] not in self.agent.event_names:
                raise BadRequest(409, f"event {op['event']!r} is not declared by this agent")
            ident = op["identifier"]
            taken = ident in self.agent.declared_identifiers
            taken = taken or any(r.identifier == ident for r in self.cfg.events)
            taken = taken or any(
                q["op"] == "post-event" and q["identifier"] == ident for q in self.injections
            )
            if taken:
                raise BadRequest(409, f"identifier {ident!r} is already in use")

    def inject(self, op: dict) -> dict:
        with self.lock:
            self.validate_injection(op)
            self.injections.append(op)
            return {"accepted": True, "queued": len(self.injections)}

    def step(self, count: int) -> dict:
        with self.lock:
            while self.injections:
                self._apply_injection(self.injections.pop(0))
            applied = 0
            for _ in range(count):
                succs = agent_successors(self.agent, self.cfg)
                if not succs:
                    if not self._quiescent_announced:
                        self._emit("quiescent", {"step": self.step_count})
                        self._quiescent_announced = True
                    break
                chosen = succs[0] if self.policy == "fifo" else self.rng.choice(succs)
                record = report.step_record(self.step_count, chosen, self.cfg, self.table)
                changes = report.status_changes(self.cfg, chosen.config)
                self.cfg = chosen.config
                self.step_count += 1
                applied += 1
                self._quiescent_announced = False
                self._journal_write({"op": "step", "rule": chosen.rule, "detail": chosen.detail})
                self._emit("step", record)
                # attention directly follows its step event so a consumer sees
                # the flag before any bookkeeping for the same step
                for event, identifier in chosen.attention:
                    self._emit(
                        "attention",
                        {"step": record["step"], "event": event, "identifier": identifier},
                    )
                if changes:
                    self._emit("status-change", {"step": record["step"], "changes": changes})
            if applied and not agent_successors(self.agent, self.cfg):
                if not self._quiescent_announced:
                    self._emit("quiescent", {"step": self.step_count})
                    self._quiescent_announced = True
            snap = self._snapshot_locked()
            snap["applied"] = applied
            return snap

    def events_after(self, seq: int, timeout: float) -> list[dict]:
        """Events with seq > the given one, waiting up to timeout if none yet."""
        with self.lock:
            if len(self.events) <= seq + 1:
                self.changed.wait(timeout)
            return self.events[seq + 1:]

    def close(self) -> None:
        if self._journal is not None:
            self._journal.close()


def replay_journal(source: str, lines: list[str]) -> AgentConfig:
    """Re-run a journal; deterministic policies make this reproduce the session."""
    agent = parse_program(source, "<replay>")
    cfg = initial_config(agent)
    rng = Random(0)
    policy = "fifo"
    for line in lines:
        entry = json.loads(line)
        if entry["op"] == "create":
            policy = entry["policy"]
            rng = Random(entry["seed"])
        elif entry["op"] == "inject":
            op = entry["injection"]
            if op["op"] == "add-belief":
                cfg = AgentConfig(cfg.events, cfg.beliefs | {op["atom"]}, cfg.intentions, cfg.fired_motivations)
            elif op["op"] == "remove-belief":
                cfg = AgentConfig(cfg.events, cfg.beliefs - {op["atom"]}, cfg.intentions, cfg.fired_motivations)
            elif op["op"] == "post-event":
                cfg = AgentConfig(
                    cfg.events | {EventRecord(op["event"], op["identifier"], PENDING)},
                    cfg.beliefs,
                    cfg.intentions,
                    cfg.fired_motivations,
                )
        elif entry["op"] == "step":
            succs = agent_successors(agent, cfg)
            if not succs:
                continue
            chosen = succs[0] if policy == "fifo" else rng.choice(succs)
            cfg = chosen.config
    return cfg


class SimService:
    def __init__(self, default_source: str, journal_dir: str | None = None):
        self.default_source = default_source
        self.journal_dir = journal_dir
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        if journal_dir:
            os.makedirs(journal_dir, exist_ok=True)

    def create_session(self, body: dict) -> Session:
        source = body.get("source", self.default_source)
        policy = body.get("policy", "fifo")
        seed = body.get("seed", 0)
        if not isinstance(source, str) or policy not in ("fifo", "random") or not isinstance(seed, int):
            raise BadRequest(422, "body must be {source?: str, policy?: fifo|random, seed?: int}")
        sid = secrets.token_hex(8)
        journal_path = os.path.join(self.journal_dir, f"{sid}.jsonl") if self.journal_dir else None
        try:
            session = Session(sid, source, policy, seed, journal_path)
        except (ParseError, ValidationError) as err:
            raise BadRequest(422, str(err))
        with self.lock:
            self.sessions[sid] = session
        return session

    def get(self, sid: str) -> Session:
        with self.lock:
            session = self.sessions.get(sid)
        if session is None:
            raise BadRequest(404, f"no session {sid!r}")
        return session


_SESSION_ROUTE = re.compile(r"^/v1/sessions/([0-9a-f]+)/(state|step|inject|stream)$")

_INJECTION_SHAPES: dict[str, set[str]] = {
    "add-belief": {"op", "atom"},
    "remove-belief": {"op", "atom"},
    "post-event": {"op", "event", "identifier"},
    "marker": {"op", "note"},
}


def _validate_injection_shape(body: dict) -> dict:
    op = body.get("op")
    if op not in _INJECTION_SHAPES:
        raise BadRequest(422, f"op must be one of {sorted(_INJECTION_SHAPES)}")
    expected = _INJECTION_SHAPES[op]
    if set(body) != expected:
        raise BadRequest(422, f"{op} requires exactly the fields {sorted(expected)}")
    for key, value in body.items():
        if not isinstance(value, str):
            raise BadRequest(422, f"field {key!r} must be a string")
    return body


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: SimService  # set by make_server
    ui_dir: str | None = None

    # silence per-request stderr noise
    def log_message(self, fmt: str, *args) -> None:
        pass

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID")

    def _send_json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload, sort_keys=True).encode()
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length > 1_000_000:
            raise BadRequest(422, "request body too large")
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            raise BadRequest(422, "request body is not valid JSON")
        if not isinstance(body, dict):
            raise BadRequest(422, "request body must be a JSON object")
        return body

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self) -> None:
        try:
            path = urlparse(self.path).path
            if path == "/v1/sessions":
                session = self.service.create_session(self._read_body())
                self._send_json(
                    201,
                    {
                        "id": session.id,
                        "stream": f"/v1/sessions/{session.id}/stream",
                        "snapshot": session.snapshot(),
                    },
                )
                return
            m = _SESSION_ROUTE.match(path)
            if m and m.group(2) == "step":
                session = self.service.get(m.group(1))
                body = self._read_body()
                count = body.get("count", 1)
                if not isinstance(count, int) or isinstance(count, bool) or not 0 <= count <= 100_000:
                    raise BadRequest(422, "count must be an integer in [0, 100000]")
                self._send_json(200, session.step(count))
                return
            if m and m.group(2) == "inject":
                session = self.service.get(m.group(1))
                op = _validate_injection_shape(self._read_body())
                self._send_json(202, session.inject(op))
                return
            raise BadRequest(404, f"no such endpoint: POST {path}")
        except BadRequest as err:
            self._send_json(err.status, {"error": err.message, "status": err.status})

    def do_GET(self) -> None:
        try:
            parsed = urlparse(self.path)
            m = _SESSION_ROUTE.match(parsed.path)
            if m and m.group(2) == "state":
                self._send_json(200, self.service.get(m.group(1)).snapshot())
                return
            if m and m.group(2) == "stream":
                self._stream(self.service.get(m.group(1)), parse_qs(parsed.query))
                return
            if self.ui_dir is not None and self._serve_static(parsed.path):
                return
            raise BadRequest(404, f"no such endpoint: GET {parsed.path}")
        except BadRequest as err:
            self._send_json(err.status, {"error": err.message, "status": err.status})

    def _serve_static(self, path: str) -> bool:
        import mimetypes

        rel = "index.html" if path == "/" else path.lstrip("/")
        root = os.path.realpath(self.ui_dir)
        full = os.path.realpath(os.path.join(root, rel))
        if not full.startswith(root + os.sep) and full != os.path.join(root, "index.html"):
            return False
        if not os.path.isfile(full):
            return False
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            data = fh.read()
        self.send_response(200)
        self._cors()
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)
        return True

    def _stream(self, session: Session, query: dict) -> None:
        last = -1
        if "since" in query:
            try:
                last = int(query["since"][0])
            except ValueError:
                raise BadRequest(422, "since must be an integer event seq")
        elif self.headers.get("Last-Event-ID"):
            try:
                last = int(self.headers["Last-Event-ID"])
            except ValueError:
                raise BadRequest(422, "Last-Event-ID must be an integer event seq")

        self.send_response(200)
        self._cors()
        self.send_header("Content-Type", "text/event-stream; charset=utf-8")
        self.send_header("Cache-Control", "no-cache")
        self.end_headers()
        try:
            self.wfile.write(b": connected\n\n")
            self.wfile.flush()
            while True:
                batch = session.events_after(last, timeout=0.25)
                for entry in batch:
                    payload = json.dumps(entry["data"], sort_keys=True)
                    chunk = f"id: {entry['seq']}\nevent: {entry['event']}\ndata: {payload}\n\n"
                    self.wfile.write(chunk.encode())
                    last = entry["seq"]
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError):
            return


def make_server(
    source: str,
    host: str = "127.0.0.1",
    port: int = 0,
    journal_dir: str | None = None,
    ui_dir: str | None = None,
) -> ThreadingHTTPServer:
    service = SimService(source, journal_dir)
    handler = type("Handler", (_Handler,), {"service": service, "ui_dir": ui_dir})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    server.service = service  # type: ignore[attr-defined]
    return server


def serve(
    source: str,
    host: str = "127.0.0.1",
    port: int = 8450,
    journal_dir: str | None = None,
    ui_dir: str | None = None,
) -> None:
    server = make_server(source, host, port, journal_dir, ui_dir)
    actual = server.server_address
    print(f"serving on http://{actual[0]}:{actual[1]}/v1 (Ctrl-C to stop)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()

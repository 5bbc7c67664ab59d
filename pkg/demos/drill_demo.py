"""Run the engine-malfunction drill against a live service instance: step the
UAV agent, inject the malfunction mid-flight, and read the transparency
stream that a dashboard would consume.

    python3 demos/drill_demo.py
"""

import json
import pathlib
import threading
import urllib.request

from canrt.service import make_server

EXAMPLES = pathlib.Path(__file__).parent.parent / "src" / "canrt" / "examples"

server = make_server((EXAMPLES / "uav.can").read_text(), port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
host, port = server.server_address
base = f"http://{host}:{port}/v1"
print(f"service on {base}")


def call(method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(base + path, data=data, method=method)
    if data:
        req.add_header("Content-Type", "application/json")
    with urllib.request.urlopen(req, timeout=5) as resp:
        return json.loads(resp.read())


sid = call("POST", "/sessions", {"policy": "fifo"})["id"]
call("POST", f"/sessions/{sid}/step", {"count": 4})          # take off
call("POST", f"/sessions/{sid}/inject", {"op": "add-belief", "atom": "engine_malfunc"})
snap = call("POST", f"/sessions/{sid}/step", {"count": 200})  # run to quiescence

print("final statuses:", {r["identifier"]: r["status"] for r in snap["records"]})
print("final beliefs: ", snap["beliefs"])

print("\nevent stream replay:")
req = urllib.request.Request(f"{base}/sessions/{sid}/stream")
with urllib.request.urlopen(req, timeout=5) as resp:
    kind = None
    seen = 0
    while seen <= snap["last_event_seq"]:
        line = resp.readline().decode().rstrip("\n")
        if line.startswith("event: "):
            kind = line[7:]
        elif line.startswith("data: "):
            data = json.loads(line[6:])
            seen += 1
            if kind == "step":
                print(f"  step {data['step']:3} {data['rule']:14} {data['detail']}")
            elif kind == "status-change":
                changes = ", ".join(f"{c['identifier']}: {c['from']} -> {c['to']}"
                                    for c in data["changes"])
                print(f"           status   {changes}")
            elif kind == "attention":
                print(f"           ATTENTION -> event {data['event']} ({data['identifier']})")
            elif kind == "quiescent":
                print(f"           quiescent after step {data['step']}")

server.shutdown()
server.server_close()

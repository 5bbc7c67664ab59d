import { describe, expect, it } from "vitest";

import { esc, render } from "../src/render.js";
import { initialState, reduceAll, type State } from "../src/store.js";
import type { Snapshot } from "../src/types.js";

function snap(over: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "snapshot",
    session: "abc123",
    policy: "fifo",
    seed: 0,
    step: 0,
    quiescent: false,
    beliefs: [],
    records: [{ event: "e_retrv", identifier: "identifier1", status: "pending" }],
    intentions: [],
    fired_motivations: [],
    pending_injections: 0,
    last_event_seq: -1,
    ...over,
  };
}

describe("render", () => {
  it("fresh session: one pending card, empty progress bar", () => {
    const html = render(initialState(snap()));
    expect(html).toContain('chip chip-pending');
    expect(html).toContain("identifier1");
    expect(html).not.toContain("bar-fill"); // no estimate yet
    expect(html).toContain("no estimate yet");
  });

  it("a 3/4 trace renders a 75% bar", () => {
    const st = initialState(
      snap({
        records: [{ event: "e1", identifier: "id1", status: "active" }],
        intentions: [
          {
            identifier: "id1",
            root: "e1",
            body: "a2",
            trace: ["e1", "P1", "a1"],
            ratio: 0.75,
            ratio_min: 0.75,
            ratio_max: 0.75,
            ratio_exact: "3/4",
          },
        ],
      }),
    );
    const html = render(st);
    expect(html).toContain('width:75.0%');
    expect(html).toContain("3/4");
    expect(html).not.toContain("bar-band"); // no ambiguity, no band
  });

  it("an ambiguous estimate shows the band overlay over the conservative fill", () => {
    const st = initialState(
      snap({
        records: [{ event: "e1", identifier: "id1", status: "active" }],
        intentions: [
          {
            identifier: "id1",
            root: "e1",
            body: "plans(e1: P1,P2)",
            trace: ["e1"],
            ratio: 0.2,
            ratio_min: 0.2,
            ratio_max: 0.25,
            ratio_exact: "1/5",
          },
        ],
      }),
    );
    const html = render(st);
    expect(html).toContain('class="bar-fill" style="width:20.0%"');
    expect(html).toContain('class="bar-band" style="left:20.0%;width:5.0%"');
  });

  it("failure status gets the failure chip", () => {
    const st = initialState(
      snap({ records: [{ event: "e_retrv", identifier: "identifier1", status: "failure" }] }),
    );
    expect(render(st)).toContain("chip-failure");
  });

  it("banners render with an acknowledge control keyed by stream seq", () => {
    const st: State = reduceAll(initialState(snap()), [
      { id: 0, kind: "attention", data: { step: 5, event: "e_parked", identifier: "identifier2" } },
    ]);
    const html = render(st);
    expect(html).toContain('data-banner="0"');
    expect(html).toContain('data-ack="0"');
    expect(html).toContain("e_parked");
    expect(html).toContain("step 5");
  });

  it("quiescent flag renders a badge, pending call disables controls", () => {
    const st = initialState(snap({ quiescent: true }));
    const html = render(st, { pending: "stepping 1" });
    expect(html).toContain("chip-quiescent");
    expect(html).toMatch(/data-step="1" disabled/);
  });

  it("escapes markup in names", () => {
    expect(esc('<b a="1">&')).toBe("&lt;b a=&quot;1&quot;&gt;&amp;");
    const st = initialState(
      snap({ beliefs: ["<script>alert(1)</script>"] }),
    );
    expect(render(st)).not.toContain("<script>alert");
  });

  it("rendering is a pure function of the state", () => {
    const st = initialState(snap());
    expect(render(st)).toBe(render(st));
  });
});

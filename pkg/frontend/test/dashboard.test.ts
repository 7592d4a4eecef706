import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AnswerSubmitter, emptyState, poll } from "../src/dashboard.js";
import { renderDashboard, renderHeatmapSvg, renderTimeline } from "../src/render.js";
import { computeGraphView, computeHeatmapView } from "../src/views.js";
import type { PendingRequest } from "../src/types.js";

interface MockService {
  mode?: "Autonomous" | "Suspended";
  weights?: Record<string, number>;
  operator?: { basis: string[]; re: number[][]; im: number[][] };
  pending?: PendingRequest[];
  detections?: { t: number; segment: string[]; reduction: number }[];
  answerStatus?: number;
}

function json(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

/** In-memory stand-in for the engine service, recording every POST. */
function mockClient(service: MockService) {
  const posts: { url: string; body: unknown }[] = [];
  const weights = service.weights ?? { a: 0.25, b: 0.25, c: 0.25, d: 0.25 };
  const ids = Object.keys(weights);
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    if (init?.method === "POST") {
      posts.push({ url, body: JSON.parse(String(init.body)) });
      return new Response(JSON.stringify({}), { status: service.answerStatus ?? 200 });
    }
    if (url.endsWith("/state")) {
      return json({ actor_id: "alice", mode: service.mode ?? "Autonomous", weights });
    }
    if (url.endsWith("/graph")) {
      return json({
        nodes: ids.map((id) => ({
          id,
          weight: weights[id],
          relevance: 0.5,
          uncertainty: 0.1,
          risk: 0,
        })),
        edges: [{ from: ids[0], to: ids[1], kind: "Supports", weight: 0.4 }],
        suspended: (service.mode ?? "Autonomous") === "Suspended",
      });
    }
    if (url.endsWith("/operator")) {
      return json(
        service.operator ?? {
          basis: ids,
          re: ids.map(() => ids.map(() => 0)),
          im: ids.map(() => ids.map(() => 0)),
        }
      );
    }
    if (url.endsWith("/divergence")) {
      return json({
        trace: [
          { t: 1, epsilon: 0.1, fidelity_term: 0.9, uncertainty_term: 0.05 },
          { t: 2, epsilon: 0.6, fidelity_term: 0.3, uncertainty_term: 0.1 },
        ],
        detections: service.detections ?? [],
      });
    }
    if (url.endsWith("/pending")) {
      return json({ pending: service.pending ?? [] });
    }
    if (url.endsWith("/patterns")) {
      return json({ patterns: [] });
    }
    throw new Error(`unmocked url: ${url}`);
  };
  return { client: new ApiClient("", fetchImpl), posts };
}

const request: PendingRequest = {
  id: "alice-req001",
  issued_at: 40,
  statement: "Signals around a, b have stopped matching expectations.",
  question: "Which reading fits best?",
  options: [
    { label: "keep a", keep_nodes: ["a"] },
    { label: "None of these / other", keep_nodes: ["a", "b", "c", "d"] },
  ],
};

describe("graph view", () => {
  it("renders equal-radius nodes for uniform weights", async () => {
    const { client } = mockClient({ weights: { a: 0.25, b: 0.25, c: 0.25, d: 0.25 } });
    const state = await poll(client, emptyState("alice"));
    const radii = new Set(state.graph!.nodes.map((n) => n.radius));
    expect(radii.size).toBe(1);
  });

  it("gives heavier nodes strictly larger radii", () => {
    const view = computeGraphView({
      nodes: [
        { id: "a", weight: 0.7, relevance: 0.5, uncertainty: 0, risk: 0 },
        { id: "b", weight: 0.2, relevance: 0.5, uncertainty: 0, risk: 0 },
        { id: "c", weight: 0.1, relevance: 0.5, uncertainty: 0, risk: 0 },
      ],
      edges: [],
      suspended: false,
    });
    const byId = new Map(view.nodes.map((n) => [n.id, n.radius]));
    expect(byId.get("a")!).toBeGreaterThan(byId.get("b")!);
    expect(byId.get("b")!).toBeGreaterThan(byId.get("c")!);
  });
});

describe("heatmap view", () => {
  it("renders an all-black heatmap for a zero operator", () => {
    const view = computeHeatmapView({
      basis: ["a", "b", "c"],
      re: [
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
      ],
      im: [
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
      ],
    });
    expect(view.cells).toHaveLength(9);
    for (const cell of view.cells) {
      expect(cell.color).toBe("#000000");
    }
    const svg = renderHeatmapSvg(view);
    expect(svg.match(/#000000/g)).toHaveLength(9);
  });

  it("colors only exactly-zero entries black", () => {
    const view = computeHeatmapView({
      basis: ["a", "b"],
      re: [
        [0.5, 0],
        [0, 1e-12],
      ],
      im: [
        [0, 0],
        [0, 0],
      ],
    });
    const colors = new Map(view.cells.map((c) => [`${c.row},${c.col}`, c.color]));
    expect(colors.get("a,b")).toBe("#000000");
    expect(colors.get("a,a")).not.toBe("#000000");
    expect(colors.get("b,b")).not.toBe("#000000"); // tiny but nonzero
  });
});

describe("suspension", () => {
  it("flags suspension on the dashboard", async () => {
    const { client } = mockClient({ mode: "Suspended", pending: [request] });
    const state = await poll(client, emptyState("alice"));
    expect(state.suspended).toBe(true);
    const html = renderDashboard(state);
    expect(html).toContain('data-suspended="true"');
    expect(html).toContain("SUSPENDED");
    expect(html).toContain("Which reading fits best?");
  });

  it("shows no suspension banner when autonomous", async () => {
    const { client } = mockClient({});
    const state = await poll(client, emptyState("alice"));
    expect(state.suspended).toBe(false);
    expect(renderDashboard(state)).not.toContain("SUSPENDED");
  });
});

describe("clarification panel", () => {
  it("submits exactly one answer per pending request", async () => {
    const { client, posts } = mockClient({ mode: "Suspended", pending: [request] });
    const submitter = new AnswerSubmitter(client, "alice", request);
    const first = await submitter.submit(0);
    const second = await submitter.submit(1);
    const third = await submitter.submit(null);
    expect(first).toBe("submitted");
    expect(second).toBe("duplicate");
    expect(third).toBe("duplicate");
    expect(posts).toHaveLength(1);
    expect(posts[0].url).toContain("/clarifications/alice-req001/answer");
    expect(posts[0].body).toEqual({ chosen: 0, free_text: "" });
  });

  it("submits an unresolved marker when the operator declines to choose", async () => {
    const { client, posts } = mockClient({ mode: "Suspended", pending: [request] });
    const submitter = new AnswerSubmitter(client, "alice", request);
    await submitter.submit(null, "still unclear");
    expect(posts[0].body).toEqual({ chosen: null, free_text: "still unclear" });
  });

  it("reports a stale request without retrying", async () => {
    const { client, posts } = mockClient({ answerStatus: 409 });
    const submitter = new AnswerSubmitter(client, "alice", request);
    expect(await submitter.submit(0)).toBe("stale");
    expect(await submitter.submit(0)).toBe("duplicate");
    expect(posts).toHaveLength(1);
    expect(submitter.done).toBe(true);
  });
});

describe("timeline and resilience", () => {
  it("places a marker at each detection step", async () => {
    const { client } = mockClient({
      detections: [{ t: 2, segment: ["a"], reduction: 0.8 }],
    });
    const state = await poll(client, emptyState("alice"));
    expect(state.markers).toEqual([{ t: 2, segment: ["a"] }]);
    expect(renderTimeline(state)).toContain('data-marker-t="2"');
  });

  it("keeps the last state and flags staleness on connection loss", async () => {
    const { client } = mockClient({ mode: "Suspended", pending: [request] });
    const live = await poll(client, emptyState("alice"));
    const dead = new ApiClient("", async () => {
      throw new Error("connection refused");
    });
    const after = await poll(dead, live);
    expect(after.stale).toBe(true);
    expect(after.suspended).toBe(true);
    expect(after.graph).toEqual(live.graph);
    expect(renderDashboard(after)).toContain("stale");
  });
});

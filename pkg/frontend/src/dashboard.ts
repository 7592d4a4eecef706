import { ApiClient, StaleRequestError } from "./api.js";
import type {
  Detection,
  PendingRequest,
  PopulationPattern,
  TracePoint,
} from "./types.js";
import { computeGraphView, computeHeatmapView, GraphView, HeatmapView } from "./views.js";

export interface TimelineMarker {
  t: number;
  segment: string[];
}

export interface DashboardState {
  actor: string;
  suspended: boolean;
  graph: GraphView | null;
  heatmap: HeatmapView | null;
  trace: TracePoint[];
  markers: TimelineMarker[];
  pending: PendingRequest[];
  patterns: PopulationPattern[];
  stale: boolean;
}

export function emptyState(actor: string): DashboardState {
  return {
    actor,
    suspended: false,
    graph: null,
    heatmap: null,
    trace: [],
    markers: [],
    pending: [],
    patterns: [],
    stale: false,
  };
}

function toMarkers(detections: Detection[]): TimelineMarker[] {
  return detections.map((d) => ({ t: d.t, segment: d.segment }));
}

/** One polling cycle: fetch every panel's data, derive the next dashboard
 * state. On connection loss the previous state is kept, flagged stale. */
export async function poll(
  client: ApiClient,
  previous: DashboardState
): Promise<DashboardState> {
  try {
    const [state, graph, operator, divergence, pending, patterns] = await Promise.all([
      client.getState(previous.actor),
      client.getGraph(previous.actor),
      client.getOperator(previous.actor),
      client.getDivergence(previous.actor),
      client.getPending(previous.actor),
      client.getPatterns(),
    ]);
    return {
      actor: previous.actor,
      suspended: state.mode === "Suspended",
      graph: computeGraphView(graph),
      heatmap: computeHeatmapView(operator),
      trace: divergence.trace,
      markers: toMarkers(divergence.detections),
      pending: pending.pending,
      patterns: patterns.patterns,
      stale: false,
    };
  } catch {
    return { ...previous, stale: true };
  }
}

export type SubmitOutcome = "submitted" | "duplicate" | "stale";

/** One submitter per pending request shown to the operator. The first
 * submit wins; later attempts (double clicks, re-entry) are blocked
 * client-side so each shown request maps to at most one answer. */
export class AnswerSubmitter {
  private submitted = false;

  constructor(
    private readonly client: ApiClient,
    private readonly actor: string,
    readonly request: PendingRequest
  ) {}

  get done(): boolean {
    return this.submitted;
  }

  /** chosen = option index, or null for the explicit "unresolved" choice. */
  async submit(chosen: number | null, freeText = ""): Promise<SubmitOutcome> {
    if (this.submitted) {
      return "duplicate";
    }
    this.submitted = true;
    try {
      await this.client.postAnswer(this.actor, this.request.id, {
        chosen,
        free_text: freeText,
      });
      return "submitted";
    } catch (err) {
      if (err instanceof StaleRequestError) {
        // the request was resolved elsewhere; the next poll refreshes the
        // pending list, and this panel stays disabled
        return "stale";
      }
      throw err;
    }
  }
}

// JSON payload shapes of the engine service. The console consumes exactly
// these endpoints and nothing else.

export interface GraphNode {
  id: string;
  weight: number;
  relevance: number;
  uncertainty: number;
  risk: number;
}

export interface GraphEdge {
  from: string;
  to: string;
  kind: string;
  weight: number;
}

export interface GraphResponse {
  nodes: GraphNode[];
  edges: GraphEdge[];
  suspended: boolean;
}

export interface StateResponse {
  actor_id: string;
  mode: "Autonomous" | "Suspended";
  weights: Record<string, number>;
}

export interface OperatorResponse {
  basis: string[];
  re: number[][];
  im: number[][];
}

export interface TracePoint {
  t: number;
  epsilon: number;
  fidelity_term: number;
  uncertainty_term: number;
}

export interface Detection {
  t: number;
  segment: string[];
  reduction: number;
}

export interface DivergenceResponse {
  trace: TracePoint[];
  detections: Detection[];
}

export interface InterpretationOption {
  label: string;
  keep_nodes: string[];
}

export interface PendingRequest {
  id: string;
  issued_at: number;
  statement: string;
  question: string;
  options: InterpretationOption[];
}

export interface PendingResponse {
  pending: PendingRequest[];
}

export interface PopulationPattern {
  relation_profile: string;
  actor_count: number;
  episode_count: number;
  unresolved_fraction: number;
}

export interface PatternsResponse {
  patterns: PopulationPattern[];
}

export interface AnswerBody {
  chosen: number | null;
  free_text?: string;
}

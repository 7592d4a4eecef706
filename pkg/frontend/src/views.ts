import type { GraphResponse, OperatorResponse } from "./types.js";

export interface ViewNode {
  id: string;
  x: number;
  y: number;
  radius: number;
  color: string;
  weight: number;
}

export interface ViewEdge {
  from: string;
  to: string;
  kind: string;
  color: string;
}

export interface GraphView {
  nodes: ViewNode[];
  edges: ViewEdge[];
  suspended: boolean;
}

export interface HeatmapCell {
  row: string;
  col: string;
  magnitude: number;
  color: string;
}

export interface HeatmapView {
  basis: string[];
  cells: HeatmapCell[];
}

const MIN_RADIUS = 4;
const MAX_RADIUS = 28;

/** Cold-to-warm scale: dark blue -> vivid blue -> dark red -> bright red.
 * Input in [0, 1]. */
export function coldToWarm(v: number): string {
  const x = Math.max(0, Math.min(1, v));
  const stops: [number, [number, number, number]][] = [
    [0.0, [0, 0, 96]], // dark/cold blue
    [0.33, [32, 96, 255]], // vivid blue
    [0.66, [139, 0, 0]], // dark red
    [1.0, [255, 48, 48]], // bright red
  ];
  for (let i = 1; i < stops.length; i++) {
    const [x1, c1] = stops[i - 1];
    const [x2, c2] = stops[i];
    if (x <= x2) {
      const f = (x - x1) / (x2 - x1);
      const rgb = c1.map((a, k) => Math.round(a + f * (c2[k] - a)));
      return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
    }
  }
  return "rgb(255,48,48)";
}

/** Deterministic circular layout keyed by sorted node id, so snapshots are
 * comparable run to run; radius is a monotone map of activation weight. */
export function computeGraphView(graph: GraphResponse, size = 400): GraphView {
  const ids = graph.nodes.map((n) => n.id).sort();
  const center = size / 2;
  const ring = size * 0.38;
  const maxWeight = Math.max(...graph.nodes.map((n) => n.weight), 1e-12);
  const nodes = graph.nodes.map((n) => {
    const slot = ids.indexOf(n.id);
    const angle = (2 * Math.PI * slot) / Math.max(ids.length, 1);
    return {
      id: n.id,
      x: center + ring * Math.cos(angle),
      y: center + ring * Math.sin(angle),
      radius: MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * Math.sqrt(n.weight / maxWeight),
      color: coldToWarm(n.weight / maxWeight),
      weight: n.weight,
    };
  });
  const maxCoupling = Math.max(...graph.edges.map((e) => Math.abs(e.weight)), 1e-12);
  const edges = graph.edges.map((e) => ({
    from: e.from,
    to: e.to,
    kind: e.kind,
    color: coldToWarm(Math.abs(e.weight) / maxCoupling),
  }));
  return { nodes, edges, suspended: graph.suspended };
}

/** Heatmap over the operator matrix; a cell is black exactly when the
 * complex entry is exactly zero (absent edge). */
export function computeHeatmapView(op: OperatorResponse): HeatmapView {
  const n = op.basis.length;
  let maxMag = 0;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      maxMag = Math.max(maxMag, Math.hypot(op.re[i][j], op.im[i][j]));
    }
  }
  const cells: HeatmapCell[] = [];
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const magnitude = Math.hypot(op.re[i][j], op.im[i][j]);
      const exactZero = op.re[i][j] === 0 && op.im[i][j] === 0;
      cells.push({
        row: op.basis[i],
        col: op.basis[j],
        magnitude,
        color: exactZero ? "#000000" : coldToWarm(magnitude / maxMag),
      });
    }
  }
  return { basis: [...op.basis], cells };
}

import type { DashboardState } from "./dashboard.js";
import type { GraphView, HeatmapView } from "./views.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderGraphSvg(view: GraphView, size = 400): string {
  const pos = new Map(view.nodes.map((n) => [n.id, n]));
  const edges = view.edges
    .map((e) => {
      const a = pos.get(e.from);
      const b = pos.get(e.to);
      if (!a || !b) return "";
      return `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" stroke="${e.color}" stroke-width="1.5" />`;
    })
    .join("");
  const nodes = view.nodes
    .map(
      (n) =>
        `<circle cx="${n.x}" cy="${n.y}" r="${n.radius}" fill="${n.color}" data-node="${esc(n.id)}"><title>${esc(n.id)} (${n.weight.toFixed(3)})</title></circle>`
    )
    .join("");
  return `<svg viewBox="0 0 ${size} ${size}" class="graph-view">${edges}${nodes}</svg>`;
}

export function renderHeatmapSvg(view: HeatmapView, cell = 24): string {
  const index = new Map(view.basis.map((b, i) => [b, i]));
  const rects = view.cells
    .map((c) => {
      const x = (index.get(c.col) ?? 0) * cell;
      const y = (index.get(c.row) ?? 0) * cell;
      return `<rect x="${x}" y="${y}" width="${cell}" height="${cell}" fill="${c.color}"><title>${esc(c.row)} x ${esc(c.col)}: ${c.magnitude.toFixed(4)}</title></rect>`;
    })
    .join("");
  const side = view.basis.length * cell;
  return `<svg viewBox="0 0 ${side} ${side}" class="heatmap-view">${rects}</svg>`;
}

export function renderTimeline(state: DashboardState, width = 600, height = 80): string {
  if (state.trace.length === 0) {
    return `<svg viewBox="0 0 ${width} ${height}" class="timeline"></svg>`;
  }
  const tMax = Math.max(...state.trace.map((p) => p.t), 1);
  const px = (t: number) => (t / tMax) * (width - 10) + 5;
  const points = state.trace
    .map((p) => `${px(p.t)},${height - 5 - p.epsilon * (height - 10)}`)
    .join(" ");
  const markers = state.markers
    .map(
      (m) =>
        `<line x1="${px(m.t)}" y1="0" x2="${px(m.t)}" y2="${height}" stroke="#ff3030" stroke-dasharray="3,2" data-marker-t="${m.t}" />`
    )
    .join("");
  return `<svg viewBox="0 0 ${width} ${height}" class="timeline"><polyline points="${points}" fill="none" stroke="#2060ff" />${markers}</svg>`;
}

export function renderPatternsTable(state: DashboardState): string {
  const rows = state.patterns
    .map(
      (p) =>
        `<tr><td>${esc(p.relation_profile) || "(none)"}</td><td>${p.actor_count}</td><td>${p.episode_count}</td><td>${(p.unresolved_fraction * 100).toFixed(0)}%</td></tr>`
    )
    .join("");
  return `<table class="patterns"><thead><tr><th>profile</th><th>actors</th><th>episodes</th><th>unresolved</th></tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderClarificationPanel(state: DashboardState): string {
  if (state.pending.length === 0) {
    return "";
  }
  const req = state.pending[0];
  const options = req.options
    .map(
      (opt, i) =>
        `<button class="option" data-request="${esc(req.id)}" data-chosen="${i}" data-keep="${esc(opt.keep_nodes.join(","))}">${esc(opt.label)}</button>`
    )
    .join("");
  return `<section class="clarification" data-request="${esc(req.id)}">
    <p class="statement">${esc(req.statement)}</p>
    <p class="question">${esc(req.question)}</p>
    ${options}
    <button class="option unresolved" data-request="${esc(req.id)}" data-chosen="">Leave unresolved</button>
  </section>`;
}

export function renderDashboard(state: DashboardState): string {
  const banner = state.stale
    ? `<div class="banner stale">connection lost, showing last known state</div>`
    : "";
  const suspension = state.suspended
    ? `<div class="banner suspended">SUSPENDED: autonomous inference paused pending clarification</div>`
    : "";
  return `<main class="dashboard" data-suspended="${state.suspended}">
  ${banner}${suspension}
  <section class="panel graph">${state.graph ? renderGraphSvg(state.graph) : ""}</section>
  <section class="panel heatmap">${state.heatmap ? renderHeatmapSvg(state.heatmap) : ""}</section>
  <section class="panel timeline">${renderTimeline(state)}</section>
  <section class="panel patterns">${renderPatternsTable(state)}</section>
  ${renderClarificationPanel(state)}
</main>`;
}

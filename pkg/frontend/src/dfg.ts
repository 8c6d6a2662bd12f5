/** Directly-follows graph rendered as an SVG string (no DOM needed).
 *
 * Nodes are laid out in layers by longest path from the sources; cycles
 * fall back to discovery order. Every edge element carries a
 * `data-edge="source->target"` attribute so tests (and debugging) can
 * find it without parsing geometry.
 */

import type { DfgEdge, DfgPayload } from "./model.js";

const NODE_W = 170;
const NODE_H = 42;
const GAP_X = 90;
const GAP_Y = 28;
const PAD = 24;

interface NodePos {
  name: string;
  x: number;
  y: number;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Layer index per activity: longest path from any source, cycle-safe. */
export function layerNodes(edges: DfgEdge[]): Map<string, number> {
  const nodes: string[] = [];
  const seen = new Set<string>();
  for (const e of edges) {
    for (const name of [e.source, e.target]) {
      if (!seen.has(name)) {
        seen.add(name);
        nodes.push(name);
      }
    }
  }
  const layer = new Map<string, number>(nodes.map((n) => [n, 0]));
  // relax longest-path; bounded passes keep cycles from looping forever
  for (let pass = 0; pass < nodes.length; pass += 1) {
    let changed = false;
    for (const e of edges) {
      const want = (layer.get(e.source) ?? 0) + 1;
      if (want > (layer.get(e.target) ?? 0) && want <= nodes.length) {
        layer.set(e.target, want);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return layer;
}

function positions(edges: DfgEdge[]): Map<string, NodePos> {
  const layers = layerNodes(edges);
  const byLayer = new Map<number, string[]>();
  for (const [name, l] of layers) {
    const bucket = byLayer.get(l) ?? [];
    bucket.push(name);
    byLayer.set(l, bucket);
  }
  const out = new Map<string, NodePos>();
  for (const [l, names] of byLayer) {
    names.forEach((name, i) => {
      out.set(name, {
        name,
        x: PAD + l * (NODE_W + GAP_X),
        y: PAD + i * (NODE_H + GAP_Y),
      });
    });
  }
  return out;
}

export function renderDfg(payload: DfgPayload): string {
  const pos = positions(payload.edges);
  if (pos.size === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="320" height="80">` +
      `<text x="16" y="40" class="dfg-empty">no edges for ` +
      `${escapeXml(payload.object_type)}</text></svg>`;
  }
  let maxX = 0;
  let maxY = 0;
  for (const p of pos.values()) {
    maxX = Math.max(maxX, p.x + NODE_W);
    maxY = Math.max(maxY, p.y + NODE_H);
  }
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${maxX + PAD}" ` +
    `height="${maxY + PAD}" class="dfg" data-object-type="${escapeXml(payload.object_type)}">`,
  );
  parts.push(
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
    `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>`,
  );
  for (const e of payload.edges) {
    const a = pos.get(e.source);
    const b = pos.get(e.target);
    if (!a || !b) continue;
    const x1 = a.x + NODE_W;
    const y1 = a.y + NODE_H / 2;
    const x2 = b.x;
    const y2 = b.y + NODE_H / 2;
    const mx = (x1 + x2) / 2;
    parts.push(
      `<g class="dfg-edge" data-edge="${escapeXml(e.source)}-&gt;${escapeXml(e.target)}">` +
      `<path d="M ${x1} ${y1} C ${mx} ${y1}, ${mx} ${y2}, ${x2} ${y2}" ` +
      `fill="none" marker-end="url(#arrow)"/>` +
      `<text x="${mx}" y="${(y1 + y2) / 2 - 6}" text-anchor="middle" ` +
      `class="dfg-count">${e.count}</text></g>`,
    );
  }
  for (const p of pos.values()) {
    parts.push(
      `<g class="dfg-node" data-activity="${escapeXml(p.name)}">` +
      `<rect x="${p.x}" y="${p.y}" width="${NODE_W}" height="${NODE_H}" rx="8"/>` +
      `<text x="${p.x + NODE_W / 2}" y="${p.y + NODE_H / 2 + 5}" ` +
      `text-anchor="middle">${escapeXml(p.name)}</text></g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

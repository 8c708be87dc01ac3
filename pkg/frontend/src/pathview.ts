/**
 * View model for the 2-D traversal path: the seed's projected product point
 * followed by every step position, connected in order, with marker hue
 * going dark to light along the direction of travel.
 */

import { ProjectResponse } from "./api.js";

export interface PathPoint {
  x: number;
  y: number;
  order: number; // 0 = seed, then step index + 1
}

/** Seed point plus step points: n steps produce n + 1 points. */
export function pathPoints(projection: ProjectResponse): PathPoint[] {
  const points: PathPoint[] = [];
  const seed = projection.products[0];
  if (seed) {
    points.push({ x: seed.x, y: seed.y, order: 0 });
  }
  projection.path.forEach((p, i) => {
    points.push({ x: p.x, y: p.y, order: points.length > 0 ? i + 1 : i });
  });
  return points;
}

/**
 * Marker color for a point: lightness rises with step order (dark start,
 * light end), hue fixed.
 */
export function hueForOrder(order: number, total: number): string {
  const t = total <= 1 ? 0 : order / (total - 1);
  const lightness = 20 + Math.round(60 * t);
  return `hsl(215, 70%, ${lightness}%)`;
}

/** Lightness percentage encoded by hueForOrder, for tests and legends. */
export function lightnessOf(color: string): number {
  const match = /(\d+)%\)$/.exec(color);
  if (!match || match[1] === undefined) {
    throw new Error(`not a path color: ${color}`);
  }
  return Number(match[1]);
}

/**
 * Render the path as a standalone SVG string: a polyline through the points
 * in order plus one circle per point. Coordinates are rescaled into the
 * viewport with a margin; a degenerate (single or collapsed) path centers.
 */
export function renderPathSvg(points: PathPoint[], width = 360, height = 240): string {
  const margin = 16;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = maxX - minX;
  const spanY = maxY - minY;
  const scale = (v: number, min: number, span: number, extent: number) =>
    span < 1e-12 ? extent / 2 : margin + ((v - min) / span) * (extent - 2 * margin);
  const placed = points.map((p) => ({
    cx: scale(p.x, minX, spanX, width),
    cy: scale(p.y, minY, spanY, height),
    order: p.order,
  }));
  const polyline = placed.map((p) => `${p.cx.toFixed(2)},${p.cy.toFixed(2)}`).join(" ");
  const circles = placed
    .map(
      (p) =>
        `<circle cx="${p.cx.toFixed(2)}" cy="${p.cy.toFixed(2)}" r="5" ` +
        `fill="${hueForOrder(p.order, points.length)}" data-order="${p.order}"/>`,
    )
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}">` +
    (placed.length > 1
      ? `<polyline points="${polyline}" fill="none" stroke="#8aa" stroke-width="1.5"/>`
      : "") +
    circles +
    `</svg>`
  );
}

/**
 * Pure HTML string builders for the explorer views, kept free of DOM and
 * network access so they are testable headlessly. All interpolated data is
 * escaped.
 */

import { Neighbor, RetrieveItem } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function productCardHtml(
  item: Neighbor & Partial<Pick<RetrieveItem, "display_ref">>,
  index?: number,
): string {
  const img = item.display_ref
    ? `<img src="${escapeHtml(item.display_ref)}" alt="${escapeHtml(item.id)}"/>`
    : "";
  const pick = index !== undefined ? ` data-index="${index}"` : "";
  return (
    `<div class="product-card"${pick}>` +
    img +
    `<div class="product-id">${escapeHtml(item.id)} (${item.similarity.toFixed(3)})</div>` +
    `</div>`
  );
}

export function searchResultsHtml(items: RetrieveItem[]): string {
  if (items.length === 0) {
    return `<p class="empty-state">no products found — try another prompt</p>`;
  }
  return items.map((item, i) => productCardHtml(item, i)).join("");
}

/** Seed card: shows the product id and, when present, its display image. */
export function seedCardHtml(seed: RetrieveItem | null): string {
  if (!seed) {
    return `<p class="empty-state">no seed selected</p>`;
  }
  const img = seed.display_ref
    ? `<img src="${escapeHtml(seed.display_ref)}" alt="${escapeHtml(seed.id)}"/>`
    : "";
  return (
    `<div class="seed-chosen">` +
    img +
    `<div class="product-id">seed: ${escapeHtml(seed.id)}</div>` +
    `</div>`
  );
}

export function historyEntryHtml(
  stepNumber: number,
  sign: string,
  drift: number,
  exhausted: boolean,
  recommendations: Neighbor[],
): string {
  const head =
    `step ${stepNumber} (${escapeHtml(sign)}) drift ${drift.toFixed(3)}` +
    (exhausted ? " — catalog exhausted" : "");
  const grid = recommendations.map((rec) => productCardHtml(rec)).join("");
  return (
    `<div class="history-entry"><div>${head}</div>` +
    `<div class="product-grid">${grid}</div></div>`
  );
}

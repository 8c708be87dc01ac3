import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  historyEntryHtml,
  productCardHtml,
  searchResultsHtml,
  seedCardHtml,
} from "../src/render.js";

const ITEM = { id: "sku-1", similarity: 0.912345, display_ref: "img://sku-1" };

describe("searchResultsHtml", () => {
  it("empty retrieval shows the empty state", () => {
    const html = searchResultsHtml([]);
    expect(html).toContain("empty-state");
    expect(html).toContain("no products found");
  });

  it("non-empty retrieval renders one selectable card per item", () => {
    const html = searchResultsHtml([ITEM, { ...ITEM, id: "sku-2", display_ref: null }]);
    expect(html.match(/product-card/g)).toHaveLength(2);
    expect(html).toContain('data-index="0"');
    expect(html).toContain('data-index="1"');
  });
});

describe("seedCardHtml", () => {
  it("displays the id and the display reference", () => {
    const html = seedCardHtml(ITEM);
    expect(html).toContain("seed: sku-1");
    expect(html).toContain('src="img://sku-1"');
  });

  it("renders without an image when there is no display reference", () => {
    const html = seedCardHtml({ ...ITEM, display_ref: null });
    expect(html).toContain("seed: sku-1");
    expect(html).not.toContain("<img");
  });

  it("shows the unselected state for a null seed", () => {
    expect(seedCardHtml(null)).toContain("no seed selected");
  });
});

describe("productCardHtml", () => {
  it("shows id with truncated similarity", () => {
    expect(productCardHtml(ITEM)).toContain("sku-1 (0.912)");
  });

  it("escapes markup in data", () => {
    const html = productCardHtml({ id: "<b>x</b>", similarity: 1.0 });
    expect(html).not.toContain("<b>");
    expect(html).toContain("&lt;b&gt;x&lt;/b&gt;");
  });
});

describe("historyEntryHtml", () => {
  it("labels the step with its sign and drift, and grids the products", () => {
    const html = historyEntryHtml(3, "less", 0.2345, false, [
      { id: "a", similarity: 0.9 },
      { id: "b", similarity: 0.8 },
    ]);
    expect(html).toContain("step 3 (less) drift 0.234");
    expect(html.match(/product-card/g)).toHaveLength(2);
  });

  it("flags catalog exhaustion", () => {
    const html = historyEntryHtml(1, "more", 0.1, true, []);
    expect(html).toContain("catalog exhausted");
  });
});

describe("escapeHtml", () => {
  it("escapes the five significant characters", () => {
    expect(escapeHtml(`&<>"'`)).toBe("&amp;&lt;&gt;&quot;&#39;");
  });
});

/**
 * Bundled comparative-dimension presets (prompt pairs); free-text pairs can
 * be authored in the UI as well.
 */

import { PromptPair } from "./session.js";

export const PRESET_PAIRS: PromptPair[] = [
  { label: "darker / lighter", neutral: "a blue shirt", exemplar: "a dark blue shirt" },
  { label: "longer / shorter", neutral: "shorts", exemplar: "pants" },
  { label: "higher / lower heel", neutral: "women's flat shoes", exemplar: "women's high heels" },
  { label: "more / less formal", neutral: "casual shoes", exemplar: "formal shoes" },
];

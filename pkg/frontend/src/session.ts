/**
 * Explorer session state: one seed product, one active comparative
 * direction, and an append-only history of steps. The exclude set sent to
 * the service is always the seed plus every recommendation shown so far, so
 * the server stays stateless and never repeats a product.
 */

import { DirectionRef, GradrecClient, Neighbor, StepResponse } from "./api.js";

export type StepSign = "more" | "less";

export interface PromptPair {
  label: string;
  neutral: string;
  exemplar: string;
}

export interface HistoryEntry {
  sign: StepSign;
  position: number[];
  recommendations: Neighbor[];
  drift: number;
  exhausted: boolean;
}

export interface TraversalControls {
  lambda?: number;
  rho?: number;
  kRec?: number;
}

export class ExplorerSession {
  private seed: string | null = null;
  private entries: HistoryEntry[] = [];
  private shown: string[] = []; // seed + recommendation ids, insertion order
  private pair: PromptPair | null = null;
  private pending = false;
  controls: TraversalControls = {};

  constructor(private readonly client: GradrecClient) {}

  get seedId(): string | null {
    return this.seed;
  }

  get direction(): PromptPair | null {
    return this.pair;
  }

  get busy(): boolean {
    return this.pending;
  }

  /** Append-only view of the step history. */
  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  /** Seed plus all shown recommendation ids, in first-seen order. */
  get excludeIds(): string[] {
    return [...this.shown];
  }

  selectSeed(id: string): void {
    this.seed = id;
    this.entries = [];
    this.shown = [id];
  }

  setDirection(pair: PromptPair): void {
    this.pair = pair;
  }

  get canStep(): boolean {
    return this.seed !== null && this.pair !== null && !this.pending;
  }

  /**
   * One "more"/"less" move. Sends the previous position (or the seed id on
   * the first step) and the full exclude set; appends the response to the
   * history. A failed request leaves the session untouched.
   */
  async takeStep(sign: StepSign): Promise<HistoryEntry> {
    if (this.seed === null || this.pair === null) {
      throw new Error("session needs a seed and a direction before stepping");
    }
    if (this.pending) {
      throw new Error("a step is already in flight");
    }
    const directionRef: DirectionRef = {
      neutral_prompt: this.pair.neutral,
      exemplar_prompt: this.pair.exemplar,
      invert: sign === "less",
    };
    const last = this.entries[this.entries.length - 1];
    const request = {
      ...(last ? { position: last.position } : { seed_id: this.seed }),
      direction_ref: directionRef,
      exclude: this.excludeIds,
      ...(this.controls.lambda !== undefined ? { lambda: this.controls.lambda } : {}),
      ...(this.controls.rho !== undefined ? { rho: this.controls.rho } : {}),
      ...(this.controls.kRec !== undefined ? { k_rec: this.controls.kRec } : {}),
    };
    this.pending = true;
    let response: StepResponse;
    try {
      response = await this.client.step(request);
    } finally {
      this.pending = false;
    }
    const entry: HistoryEntry = {
      sign,
      position: response.position,
      recommendations: response.recommendations,
      drift: response.drift,
      exhausted: response.exhausted,
    };
    this.entries = [...this.entries, entry];
    for (const rec of response.recommendations) {
      if (!this.shown.includes(rec.id)) {
        this.shown.push(rec.id);
      }
    }
    return entry;
  }
}

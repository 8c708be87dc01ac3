/**
 * DOM wiring for the explorer: pick a seed via prompt search, choose or
 * author a comparative direction, take "more"/"less" steps, inspect the
 * returned products and the projected path. All math happens server-side.
 */

import { ApiError, GradrecClient, RetrieveItem } from "./api.js";
import { pathPoints, renderPathSvg } from "./pathview.js";
import { PRESET_PAIRS } from "./presets.js";
import { historyEntryHtml, searchResultsHtml, seedCardHtml } from "./render.js";
import { ExplorerSession, StepSign } from "./session.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ?? `${window.location.protocol}//${window.location.hostname}:8000`;
}

const client = new GradrecClient(apiBase());
const session = new ExplorerSession(client);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const searchInput = $<HTMLInputElement>("search-input");
const searchButton = $<HTMLButtonElement>("search-button");
const searchResults = $<HTMLDivElement>("search-results");
const seedCard = $<HTMLDivElement>("seed-card");
const presetSelect = $<HTMLSelectElement>("preset-select");
const neutralInput = $<HTMLInputElement>("neutral-input");
const exemplarInput = $<HTMLInputElement>("exemplar-input");
const lambdaInput = $<HTMLInputElement>("lambda-input");
const rhoInput = $<HTMLInputElement>("rho-input");
const moreButton = $<HTMLButtonElement>("more-button");
const lessButton = $<HTMLButtonElement>("less-button");
const errorBanner = $<HTMLDivElement>("error-banner");
const historyList = $<HTMLDivElement>("history");
const pathContainer = $<HTMLDivElement>("path-view");

let retrievedItems: RetrieveItem[] = [];
let seedItem: RetrieveItem | null = null;

function showError(err: unknown): void {
  const text =
    err instanceof ApiError ? `${err.errorCode}: ${err.message}` : String(err);
  errorBanner.textContent = text;
  errorBanner.hidden = false;
}

function clearError(): void {
  errorBanner.hidden = true;
  errorBanner.textContent = "";
}

function syncControls(): void {
  const ready = session.canStep;
  moreButton.disabled = !ready;
  lessButton.disabled = !ready;
}

function renderHistory(): void {
  historyList.innerHTML = session.history
    .map((entry, i) =>
      historyEntryHtml(i + 1, entry.sign, entry.drift, entry.exhausted, entry.recommendations),
    )
    .join("");
}

async function renderPath(): Promise<void> {
  if (!session.seedId || session.history.length === 0) {
    pathContainer.innerHTML = session.seedId ? "<p>no steps yet</p>" : "";
    return;
  }
  const ids = session.excludeIds; // seed first, then everything shown
  const positions = session.history.map((h) => h.position);
  const projection = await client.project(ids, positions);
  pathContainer.innerHTML = renderPathSvg(pathPoints(projection));
}

async function runSearch(): Promise<void> {
  clearError();
  const prompt = searchInput.value.trim();
  if (!prompt) return;
  try {
    retrievedItems = await client.retrieve(prompt, 12);
    searchResults.innerHTML = searchResultsHtml(retrievedItems);
  } catch (err) {
    retrievedItems = [];
    searchResults.innerHTML = "";
    showError(err);
  }
}

function selectSeedByIndex(index: number): void {
  const item = retrievedItems[index];
  if (!item) return;
  seedItem = item;
  session.selectSeed(item.id);
  seedCard.innerHTML = seedCardHtml(seedItem);
  renderHistory();
  void renderPath();
  syncControls();
}

function activeDirection(): void {
  const neutral = neutralInput.value.trim();
  const exemplar = exemplarInput.value.trim();
  if (neutral && exemplar) {
    session.setDirection({ label: "custom", neutral, exemplar });
  }
  syncControls();
}

async function takeStep(sign: StepSign): Promise<void> {
  clearError();
  session.controls = {
    lambda: Number(lambdaInput.value) || undefined,
    rho: rhoInput.value === "" ? undefined : Number(rhoInput.value),
  };
  syncControls();
  try {
    await session.takeStep(sign);
    renderHistory();
    await renderPath();
  } catch (err) {
    showError(err); // session state is untouched on failure
  } finally {
    syncControls();
  }
}

export function bootstrap(): void {
  PRESET_PAIRS.forEach((pair, i) => {
    const option = document.createElement("option");
    option.value = String(i);
    option.textContent = pair.label;
    presetSelect.appendChild(option);
  });
  presetSelect.addEventListener("change", () => {
    const pair = PRESET_PAIRS[Number(presetSelect.value)];
    if (pair) {
      neutralInput.value = pair.neutral;
      exemplarInput.value = pair.exemplar;
      session.setDirection(pair);
    }
    syncControls();
  });
  neutralInput.addEventListener("change", activeDirection);
  exemplarInput.addEventListener("change", activeDirection);
  searchButton.addEventListener("click", () => void runSearch());
  searchInput.addEventListener("keydown", (e) => {
    if (e.key === "Enter") void runSearch();
  });
  searchResults.addEventListener("click", (e) => {
    const card = (e.target as HTMLElement).closest("[data-index]");
    if (card instanceof HTMLElement && card.dataset.index !== undefined) {
      selectSeedByIndex(Number(card.dataset.index));
    }
  });
  moreButton.addEventListener("click", () => void takeStep("more"));
  lessButton.addEventListener("click", () => void takeStep("less"));
  seedCard.innerHTML = seedCardHtml(null);
  syncControls();
  client
    .stats()
    .then((s) => {
      $<HTMLDivElement>("stats").textContent =
        `${s.product_count} products, dim ${s.dim}, ${s.prompt_count} prompts`;
    })
    .catch(showError);
}

bootstrap();

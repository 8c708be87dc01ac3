/**
 * Typed client for the traversal service. The UI never computes embeddings
 * or update math locally: every numeric result round-trips through these
 * endpoints.
 */

export interface Neighbor {
  id: string;
  similarity: number;
}

export interface RetrieveItem extends Neighbor {
  display_ref: string | null;
}

export interface CatalogStats {
  dim: number;
  product_count: number;
  prompt_count: number;
}

/** Identifies a direction by its build inputs; the service caches builds. */
export interface DirectionRef {
  neutral_prompt: string;
  exemplar_prompt: string;
  m?: number;
  n?: number;
  epsilon?: number;
  invert?: boolean;
}

export interface StepRequest {
  seed_id?: string;
  position?: number[];
  direction_ref: DirectionRef;
  lambda?: number;
  rho?: number;
  k_rec?: number;
  exclude: string[];
}

export interface StepResponse {
  position: number[];
  recommendations: Neighbor[];
  drift: number;
  exhausted: boolean;
}

export interface ProjectedProduct {
  id: string;
  x: number;
  y: number;
}

export interface ProjectResponse {
  products: ProjectedProduct[];
  path: { x: number; y: number }[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GradrecClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await resp.json().catch(() => null);
    if (!resp.ok) {
      const code = body && typeof body === "object" && "error_code" in body
        ? String((body as { error_code: unknown }).error_code)
        : "UnknownError";
      const message = body && typeof body === "object" && "message" in body
        ? String((body as { message: unknown }).message)
        : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, code, message);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  stats(): Promise<CatalogStats> {
    return this.request<CatalogStats>("/v1/catalog/stats");
  }

  async retrieve(prompt: string, n: number): Promise<RetrieveItem[]> {
    const body = await this.post<{ items: RetrieveItem[] }>("/v1/retrieve", { prompt, n });
    return body.items;
  }

  step(req: StepRequest): Promise<StepResponse> {
    return this.post<StepResponse>("/v1/step", req);
  }

  project(ids: string[], positions: number[][]): Promise<ProjectResponse> {
    return this.post<ProjectResponse>("/v1/project", { ids, positions });
  }
}

/** Typed client for the /api/v1 endpoints. */

import { ModelSummary, PickResponse, PlaneToken, SectionResponse } from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.base}/api/v1${path}`);
    if (!response.ok) {
      throw new Error(`GET ${path}: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: object): Promise<T> {
    const response = await this.fetchImpl(`${this.base}/api/v1${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new Error(`POST ${path}: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  model(): Promise<ModelSummary> {
    return this.get<ModelSummary>("/model");
  }

  section(body: object): Promise<SectionResponse> {
    return this.post<SectionResponse>("/section", body);
  }

  pick(origin: number[], direction: number[],
       activePlane: PlaneToken | null): Promise<PickResponse> {
    const body: Record<string, unknown> = { origin, direction };
    if (activePlane !== null) {
      body.active_plane = activePlane;
    }
    return this.post<PickResponse>("/pick", body);
  }
}

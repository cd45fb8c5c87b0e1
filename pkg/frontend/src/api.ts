import type { Explanation, MethodValue, PredictionRow, Scenario } from "./types.js";

/** Structural subset of fetch's Response so tests can hand in plain objects. */
export interface ResponseLike {
  readonly ok: boolean;
  readonly status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string) => Promise<ResponseLike>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

async function getJson<T>(fetchImpl: FetchLike, url: string): Promise<T> {
  let response: ResponseLike;
  try {
    response = await fetchImpl(url);
  } catch (err) {
    throw new ApiError(0, "unreachable", String(err));
  }
  if (!response.ok) {
    let code = "http_error";
    let detail = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { error?: string; detail?: string };
      if (typeof body.error === "string") code = body.error;
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status-based detail
    }
    throw new ApiError(response.status, code, detail);
  }
  return (await response.json()) as T;
}

export function getScenario(fetchImpl: FetchLike): Promise<Scenario> {
  return getJson(fetchImpl, "/api/scenario");
}

export function getPredictions(fetchImpl: FetchLike): Promise<PredictionRow[]> {
  return getJson(fetchImpl, "/api/predictions");
}

export function getExplanation(
  fetchImpl: FetchLike,
  rowId: number,
  method: MethodValue,
): Promise<Explanation> {
  return getJson(fetchImpl, `/api/explanations/${rowId}?method=${encodeURIComponent(method)}`);
}

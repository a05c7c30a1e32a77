/** Thin client for the documented HTTP endpoints; nothing else is called. */

export interface ResponseLike {
  ok: boolean;
  status: number;
  arrayBuffer(): Promise<ArrayBuffer>;
}

export interface FetchInit {
  method?: string;
  body?: Uint8Array;
  headers?: Record<string, string>;
  signal?: AbortSignal;
}

export type FetchLike = (url: string, init?: FetchInit) => Promise<ResponseLike>;

export type PlotKind = "performance" | "progress" | "regression";

export interface PlotQuery {
  problem: string;
  attribute: string;
  /** "ALL" selects every recorded version. */
  version: string;
  /** Empty list means every planner that ran the problem. */
  planners: string[];
  ecdf: boolean;
  showPoints: boolean;
  smoothWindow: number;
}

export const ENTITIES_PATH = "/api/entities";
export const UPLOAD_PATH = "/api/upload";

const DEFAULT_SMOOTH_WINDOW = 5;

/** Query string construction is deterministic: fixed parameter order,
 * defaults omitted, so equal selections produce equal URLs. */
export function plotPath(kind: PlotKind, q: PlotQuery, format?: "svg"): string {
  const params = new URLSearchParams();
  params.set("problem", q.problem);
  params.set("attribute", q.attribute);
  if (kind !== "regression" && q.version !== "ALL") {
    params.set("version", q.version);
  }
  if (q.planners.length > 0) {
    params.set("planners", q.planners.join(","));
  }
  if (kind === "performance" && q.ecdf) {
    params.set("ecdf", "true");
  }
  if (kind === "progress" && q.showPoints) {
    params.set("show_points", "true");
  }
  if (kind === "progress" && q.smoothWindow !== DEFAULT_SMOOTH_WINDOW) {
    params.set("smooth_window", String(q.smoothWindow));
  }
  if (format === "svg") {
    params.set("format", "svg");
  }
  return `/api/plot/${kind}?${params.toString()}`;
}

export interface Fetched {
  ok: boolean;
  status: number;
  bytes: Uint8Array;
}

export async function fetchBytes(
  fetchFn: FetchLike,
  url: string,
  init?: FetchInit,
): Promise<Fetched> {
  const resp = await fetchFn(url, init);
  const bytes = new Uint8Array(await resp.arrayBuffer());
  return { ok: resp.ok, status: resp.status, bytes };
}

export function decodeJson<T>(bytes: Uint8Array): T {
  return JSON.parse(new TextDecoder().decode(bytes)) as T;
}

/**
 * Typed client for the compute service. Every request body is validated
 * client-side before sending; every response is parsed against its schema.
 * Callers hand in an AbortSignal so stale requests cancel on control changes.
 */
import {
  ApproxRequestSchema,
  ApproxResponse,
  ApproxResponseSchema,
  FamilyMeta,
  FamilyMetaSchema,
  MarginsRequestSchema,
  MarginsResponse,
  MarginsResponseSchema,
  MeshBundle,
  MeshBundleSchema,
  MeshRequest,
  MeshRequestSchema,
  ScenarioList,
  ScenarioListSchema,
  TauCurveRequestSchema,
  TauCurveResponse,
  TauCurveResponseSchema,
  VineSpec,
} from "./schemas";

const BASE = "/api/v1";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function getJson(path: string, signal?: AbortSignal): Promise<unknown> {
  const resp = await fetch(`${BASE}${path}`, { signal });
  if (!resp.ok) throw new ServiceError(await resp.text(), resp.status);
  return resp.json();
}

async function postJson(path: string, body: unknown, signal?: AbortSignal): Promise<unknown> {
  const resp = await fetch(`${BASE}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
  if (!resp.ok) throw new ServiceError(await resp.text(), resp.status);
  return resp.json();
}

export async function fetchScenarios(signal?: AbortSignal): Promise<ScenarioList> {
  return ScenarioListSchema.parse(await getJson("/scenarios", signal));
}

export async function fetchFamilies(signal?: AbortSignal): Promise<FamilyMeta> {
  return FamilyMetaSchema.parse(await getJson("/families", signal));
}

export async function fetchMesh(req: MeshRequest, signal?: AbortSignal): Promise<MeshBundle> {
  const body = MeshRequestSchema.parse(req);
  return MeshBundleSchema.parse(await postJson("/mesh", body, signal));
}

export async function fetchMargins(
  req: { spec?: VineSpec; scenario?: string; pair: "12" | "23" | "13"; grid?: object; levels?: number[] },
  signal?: AbortSignal,
): Promise<MarginsResponse> {
  const body = MarginsRequestSchema.parse(req);
  return MarginsResponseSchema.parse(await postJson("/margins", body, signal));
}

export async function fetchTauCurve(
  req: { spec?: VineSpec; scenario?: string; points?: number },
  signal?: AbortSignal,
): Promise<TauCurveResponse> {
  const body = TauCurveRequestSchema.parse(req);
  return TauCurveResponseSchema.parse(await postJson("/tau-curve", body, signal));
}

export async function fetchApprox(
  req: { spec?: VineSpec; scenario?: string; n?: number; seed?: number },
  signal?: AbortSignal,
): Promise<ApproxResponse> {
  const body = ApproxRequestSchema.parse(req);
  return ApproxResponseSchema.parse(await postJson("/approx", body, signal));
}

/** One-in-flight request gate: issuing a new request aborts the previous. */
export class RequestGate {
  private controller: AbortController | null = null;

  issue(): AbortSignal {
    if (this.controller) this.controller.abort();
    this.controller = new AbortController();
    return this.controller.signal;
  }

  cancel(): void {
    if (this.controller) this.controller.abort();
    this.controller = null;
  }
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, ms: number) {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => fn(...args), ms);
  };
}

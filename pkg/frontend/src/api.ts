// Typed client for the workbench HTTP API. The UI talks to the service
// exclusively through these calls; it never mutates tree data locally.

import type {
  ApiErrorBody,
  ExperimentData,
  ExperimentReportData,
  MetricReportData,
  PromptSpecData,
  SessionData,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const text = await response.text();
  let body: unknown = null;
  try {
    body = text ? JSON.parse(text) : null;
  } catch {
    body = null;
  }
  if (!response.ok) {
    const err = (body ?? {}) as Partial<ApiErrorBody>;
    throw new ApiError(
      response.status,
      err.code ?? "http_error",
      err.message ?? `HTTP ${response.status}`,
      (err.detail as Record<string, unknown>) ?? {},
    );
  }
  return body as T;
}

export class WorkbenchApi {
  constructor(private base: string = "") {}

  async startSession(spec: PromptSpecData): Promise<SessionData> {
    const body = await request<{ session: SessionData }>(this.base, "/sessions", {
      method: "POST",
      body: JSON.stringify({ spec }),
    });
    return body.session;
  }

  async getSession(id: string): Promise<SessionData> {
    const body = await request<{ session: SessionData }>(this.base, `/sessions/${id}`);
    return body.session;
  }

  private async sessionPost(id: string, action: string, payload: unknown): Promise<SessionData> {
    const body = await request<{ session: SessionData }>(this.base, `/sessions/${id}/${action}`, {
      method: "POST",
      body: JSON.stringify(payload),
    });
    return body.session;
  }

  sendInsertPrompt(id: string): Promise<SessionData> {
    return this.sessionPost(id, "insert", {});
  }

  requestBranch(id: string, mode: "generalized" | "specific", component?: string,
                resourceDoc?: string): Promise<SessionData> {
    return this.sessionPost(id, "branch", {
      mode,
      component: component ?? null,
      resource_doc: resourceDoc ?? null,
    });
  }

  mergeCandidates(id: string, rootLabel?: string): Promise<SessionData> {
    return this.sessionPost(id, "merge", rootLabel ? { root_label: rootLabel } : {});
  }

  applyCosmetics(id: string, style?: Record<string, Record<string, string>>,
                 restructure?: string): Promise<SessionData> {
    return this.sessionPost(id, "cosmetics", {
      style: style ?? null,
      restructure: restructure ?? null,
    });
  }

  validate(id: string, verdict: "accept" | "refine", feedback?: string): Promise<SessionData> {
    return this.sessionPost(id, "validate", { verdict, feedback: feedback ?? null });
  }

  async fetchTreeDot(id: string): Promise<string> {
    const response = await fetch(`${this.base}/sessions/${id}/tree.dot`);
    if (!response.ok) {
      throw new ApiError(response.status, "not_found", "session has no tree yet");
    }
    return response.text();
  }

  async score(dot: string, reference?: string[]): Promise<MetricReportData> {
    const body = await request<{ report: MetricReportData }>(this.base, "/score", {
      method: "POST",
      body: JSON.stringify({ dot, reference: reference ?? null }),
    });
    return body.report;
  }

  async compileExperiment(treeDot: string, goalId: string, leafHint?: string,
                          defaults?: unknown): Promise<ExperimentData> {
    const body = await request<{ experiment: ExperimentData }>(this.base, "/experiments/compile", {
      method: "POST",
      body: JSON.stringify({
        tree_dot: treeDot,
        goal_id: goalId,
        leaf_hint: leafHint ?? null,
        defaults: defaults ?? null,
      }),
    });
    return body.experiment;
  }

  async runExperiment(experiment: ExperimentData, initialState: unknown,
                      detector: unknown, seed = 0): Promise<ExperimentReportData> {
    const body = await request<{ report: ExperimentReportData }>(this.base, "/experiments/run", {
      method: "POST",
      body: JSON.stringify({ experiment, initial_state: initialState, detector, seed }),
    });
    return body.report;
  }
}

/** Thin typed client for the controller API; every view reads through here. */

import type {
  CandidateDoc,
  ClusteredMatrixDoc,
  EngineConfigDoc,
  GymDocument,
  JobSummary,
  LayoutDoc,
  MatrixDoc,
  Project,
  RuleSetDoc,
  Schemas,
  ValidationFinding,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public findings: ValidationFinding[] = [],
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Api {
  constructor(
    private base: string,
    private token: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.base}/api/v1${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (data && (data.error ?? data.detail)) || `HTTP ${response.status}`,
        (data && data.findings) || [],
      );
    }
    return data as T;
  }

  createProject(name: string): Promise<Project> {
    return this.request("POST", "/projects", { name });
  }

  listProjects(): Promise<Project[]> {
    return this.request("GET", "/projects");
  }

  putGym(projectId: string, document: GymDocument): Promise<{ gym_id: string }> {
    return this.request("POST", `/projects/${projectId}/gyms`, document);
  }

  listGyms(projectId: string): Promise<{ id: string; name: string }[]> {
    return this.request("GET", `/projects/${projectId}/gyms`);
  }

  getGym(projectId: string, gymId: string): Promise<{ id: string; document: GymDocument }> {
    return this.request("GET", `/projects/${projectId}/gyms/${gymId}`);
  }

  putConfig(config: EngineConfigDoc, share: boolean, projectId?: string): Promise<{ config_id: string }> {
    return this.request("POST", "/configs", { config, share, project_id: projectId ?? null });
  }

  listConfigs(projectId?: string): Promise<{ id: string; shared: boolean }[]> {
    const suffix = projectId ? `?project_id=${encodeURIComponent(projectId)}` : "";
    return this.request("GET", `/configs${suffix}`);
  }

  getSchemas(): Promise<Schemas> {
    return this.request("GET", "/schemas");
  }

  createJob(projectId: string, gymId: string, configId: string, cluster = { type: "shared" }): Promise<JobSummary> {
    return this.request("POST", `/projects/${projectId}/jobs`, {
      gym_id: gymId,
      config_id: configId,
      cluster,
    });
  }

  listJobs(projectId: string): Promise<JobSummary[]> {
    return this.request("GET", `/projects/${projectId}/jobs`);
  }

  launch(jobId: string): Promise<{ id: string; status: string }> {
    return this.request("POST", `/jobs/${jobId}/launch`);
  }

  jobStatus(jobId: string): Promise<JobSummary> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  candidates(jobId: string): Promise<{ top_k: string[]; candidates: CandidateDoc[] }> {
    return this.request("GET", `/jobs/${jobId}/candidates`);
  }

  matrix(jobId: string, candidateId: string, kind: "state" | "action"): Promise<MatrixDoc> {
    return this.request("GET", `/jobs/${jobId}/candidates/${candidateId}/matrix?kind=${kind}`);
  }

  clusteredMatrix(jobId: string, candidateId: string, k: number, seed = 0): Promise<ClusteredMatrixDoc> {
    return this.request(
      "GET",
      `/jobs/${jobId}/candidates/${candidateId}/matrix?kind=clustered&k=${k}&seed=${seed}`,
    );
  }

  layout(jobId: string, candidateId: string, dims: 2 | 3, seed = 0, episode = 0): Promise<LayoutDoc> {
    return this.request(
      "GET",
      `/jobs/${jobId}/candidates/${candidateId}/layout?dims=${dims}&seed=${seed}&episode=${episode}`,
    );
  }

  rules(
    jobId: string,
    candidateId: string,
    options: { column?: string; buckets?: number; strategy?: string; lo?: number; hi?: number } = {},
  ): Promise<RuleSetDoc> {
    const params = new URLSearchParams();
    if (options.column) params.set("column", options.column);
    if (options.buckets) params.set("buckets", String(options.buckets));
    if (options.strategy) params.set("strategy", options.strategy);
    if (options.lo !== undefined) params.set("lo", String(options.lo));
    if (options.hi !== undefined) params.set("hi", String(options.hi));
    const query = params.toString();
    return this.request(
      "GET",
      `/jobs/${jobId}/candidates/${candidateId}/rules${query ? "?" + query : ""}`,
    );
  }

  codegen(spec: GymDocument, backend = "python"): Promise<{ source: string }> {
    return this.request("POST", "/codegen", { spec, backend });
  }

  catalogRoots(taxonomy: "do_type" | "industry"): Promise<CatalogBrowse> {
    return this.request("GET", `/catalog/${taxonomy}/nodes`);
  }

  catalogNode(taxonomy: "do_type" | "industry", nodeId: string): Promise<CatalogBrowse> {
    return this.request("GET", `/catalog/${taxonomy}/nodes/${encodeURIComponent(nodeId)}`);
  }

  catalogTemplate(templateId: string): Promise<{ id: string; name: string; spec: GymDocument }> {
    return this.request("GET", `/catalog/templates/${encodeURIComponent(templateId)}`);
  }

  publishTemplate(body: {
    name: string;
    description: string;
    category_ids: string[];
    spec: GymDocument;
  }): Promise<{ id: string }> {
    return this.request("POST", "/catalog/templates", body);
  }

  searchTemplates(q: string): Promise<{ id: string; name: string; description: string }[]> {
    return this.request("GET", `/catalog/search?q=${encodeURIComponent(q)}`);
  }

  /** Full persisted event history; the monitor compares live state to this. */
  replayEvents(jobId: string, fromSeq = 1): Promise<import("./types.js").JobEvent[]> {
    return this.replay(jobId, fromSeq);
  }

  private async replay(jobId: string, fromSeq: number) {
    const response = await this.fetchImpl(
      `${this.base}/api/v1/jobs/${jobId}/events?from_seq=${fromSeq}`,
      { headers: { Accept: "text/event-stream" } },
    );
    const text = await response.text();
    const events: import("./types.js").JobEvent[] = [];
    for (const line of text.split("\n")) {
      if (!line.startsWith("data: ")) continue;
      const frame = JSON.parse(line.slice(6));
      if (frame.kind === "end_of_stream") break;
      events.push(frame);
    }
    return events;
  }
}

export interface CatalogBrowse {
  parent: { id: string; title: string } | null;
  children: { id: string; title: string; template_count: number }[];
  templates: { id: string; name: string; description: string }[];
}

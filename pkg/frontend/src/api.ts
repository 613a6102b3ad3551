// Thin typed wrapper over the server's HTTP API.  All state lives
// server-side; this module only moves JSON back and forth and turns
// non-2xx responses into ApiError so nothing gets swallowed.

export interface Finding {
  kind: string;
  where: string;
  message: string;
}

export interface AuthorMeta {
  family: string;
  initials: string;
}

export interface ParamSchema {
  key: string;
  kind: "int" | "real" | "string" | "choice";
  default: unknown;
  range: [number | null, number | null] | null;
  choices: string[] | null;
  units: string;
  description: string;
}

export interface ComponentMeta {
  class: string;
  name: string;
  version: string;
  summary: string;
  authors: AuthorMeta[];
  year: number;
  license: string;
  identifier: string | null;
  parameters: ParamSchema[];
  inputs: string[];
  outputs: string[];
}

export interface CompositionDoc {
  title: string;
  clock: { start: number; stop: number; step: number; units?: string };
  components: { id: string; class: string; params?: Record<string, unknown> }[];
  links: {
    from: string;
    to: string;
    mapper?: string;
    units?: string;
    alias?: boolean;
  }[];
  outputs: { id: string; var: string; file: string }[];
}

export interface SaveResult {
  id: string;
  findings: Finding[];
}

export interface RunRecord {
  id: string;
  composition_id: string;
  owner: string;
  status: "queued" | "running" | "succeeded" | "failed";
  submitted: number | null;
  started: number | null;
  finished: number | null;
  message: string;
  outputs: string[];
}

export class ApiError extends Error {
  status: number;
  findings: Finding[];

  constructor(status: number, message: string, findings: Finding[] = []) {
    super(message);
    this.status = status;
    this.findings = findings;
  }
}

async function throwFrom(response: Response): Promise<never> {
  let message = response.statusText || "request failed";
  let findings: Finding[] = [];
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") message = body.error;
    if (body && Array.isArray(body.findings)) findings = body.findings;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, message, findings);
}

export class Api {
  base: string;
  user: string;

  constructor(base = "", user = "anonymous") {
    this.base = base.replace(/\/$/, "");
    this.user = user;
  }

  setUser(name: string): void {
    this.user = name.trim() || "anonymous";
  }

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const headers: Record<string, string> = {
      "X-User": this.user,
      ...(init.body !== undefined ? { "Content-Type": "application/json" } : {}),
      ...(init.headers as Record<string, string> | undefined),
    };
    const response = await fetch(this.base + path, { ...init, headers });
    if (!response.ok) await throwFrom(response);
    return response;
  }

  async listComponents(): Promise<ComponentMeta[]> {
    return (await this.request("/api/components")).json();
  }

  async describe(className: string): Promise<ComponentMeta> {
    return (
      await this.request("/api/components/" + encodeURIComponent(className))
    ).json();
  }

  async saveComposition(doc: CompositionDoc): Promise<SaveResult> {
    return (
      await this.request("/api/compositions", {
        method: "POST",
        body: JSON.stringify(doc),
      })
    ).json();
  }

  async replaceComposition(id: string, doc: CompositionDoc): Promise<SaveResult> {
    return (
      await this.request("/api/compositions/" + id, {
        method: "PUT",
        body: JSON.stringify(doc),
      })
    ).json();
  }

  async fetchComposition(id: string): Promise<CompositionDoc> {
    return (await this.request("/api/compositions/" + id)).json();
  }

  async share(id: string): Promise<{ id: string; shared: boolean }> {
    return (
      await this.request("/api/compositions/" + id + "/share", { method: "POST" })
    ).json();
  }

  async submitRun(compositionId: string): Promise<{ id: string; status: string }> {
    return (
      await this.request("/api/runs", {
        method: "POST",
        body: JSON.stringify({ composition_id: compositionId }),
      })
    ).json();
  }

  async runStatus(id: string): Promise<RunRecord> {
    return (await this.request("/api/runs/" + id)).json();
  }

  async runOutputs(id: string): Promise<string[]> {
    const body = await (await this.request("/api/runs/" + id + "/outputs")).json();
    return body.outputs;
  }

  async fetchOutput(id: string, name: string): Promise<string> {
    return (
      await this.request("/api/runs/" + id + "/outputs/" + encodeURIComponent(name))
    ).text();
  }

  async citation(meta: object): Promise<string> {
    const body = await (
      await this.request("/api/citation", {
        method: "POST",
        body: JSON.stringify(meta),
      })
    ).json();
    return body.citation;
  }
}

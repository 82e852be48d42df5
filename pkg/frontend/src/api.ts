// Service client. Compute calls use latest-wins cancellation: starting a new
// physical/sql request aborts the one in flight.

import {
  ComputeResult,
  Dialect,
  GenerationMode,
  ProjectDocument,
  ProjectRecord,
  ProjectSummary,
} from './types.js';

export class VersionConflict extends Error {
  constructor(public currentVersion: number) {
    super(`version conflict; server is at ${currentVersion}`);
  }
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let code = 'http_error';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code;
      message = body.error.message;
      if (code === 'version_conflict') {
        throw new VersionConflict(body.error.details.current_version);
      }
    }
  } catch (err) {
    if (err instanceof VersionConflict) throw err;
  }
  throw new ApiError(response.status, code, message);
}

export class OndaApi {
  private computeAborts = new Map<string, AbortController>();

  constructor(private base: string = '') {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as T;
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.json('/api/projects');
  }

  createProject(name: string, document: ProjectDocument): Promise<ProjectRecord> {
    return this.json('/api/projects', {
      method: 'POST',
      body: JSON.stringify({ name, document }),
    });
  }

  getProject(id: string): Promise<ProjectRecord> {
    return this.json(`/api/projects/${id}`);
  }

  saveProject(
    id: string,
    document: ProjectDocument,
    expectedVersion: number,
  ): Promise<ProjectRecord> {
    return this.json(`/api/projects/${id}`, {
      method: 'PUT',
      body: JSON.stringify({ document, expected_version: expectedVersion }),
    });
  }

  async deleteProject(id: string): Promise<void> {
    const response = await fetch(`${this.base}/api/projects/${id}`, { method: 'DELETE' });
    if (!response.ok) await raiseFor(response);
  }

  private freshAbort(key: string): AbortSignal {
    this.computeAborts.get(key)?.abort();
    const controller = new AbortController();
    this.computeAborts.set(key, controller);
    return controller.signal;
  }

  async computePhysical(
    document: ProjectDocument,
    mode: GenerationMode,
  ): Promise<ComputeResult> {
    const response = await fetch(`${this.base}/api/physical?mode=${mode}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(document),
      signal: this.freshAbort('physical'),
    });
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as ComputeResult;
  }

  async computeSql(
    document: ProjectDocument,
    mode: GenerationMode,
    dialect: Dialect,
  ): Promise<{ valid: true; sql: string } | ComputeResult> {
    const response = await fetch(`${this.base}/api/sql?mode=${mode}&dialect=${dialect}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(document),
      signal: this.freshAbort('sql'),
    });
    if (!response.ok) await raiseFor(response);
    const contentType = response.headers.get('content-type') ?? '';
    if (contentType.includes('application/json')) {
      return (await response.json()) as ComputeResult;
    }
    return { valid: true, sql: await response.text() };
  }
}

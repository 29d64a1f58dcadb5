/** Typed client for /api/v1.  The UI does no analysis math: every number
 * it shows comes from a field of one of these responses. */

import type {
  AnalysisReport,
  BiasProfile,
  CalibrationReport,
  DatasetMeta,
  ErrorPage,
  PairReport,
  SystemMeta,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

function query(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined && value !== "") {
      parts.push(`${key}=${encodeURIComponent(String(value))}`);
    }
  }
  return parts.length ? `?${parts.join("&")}` : "";
}

/* URL builders are exported separately so request shapes are unit-testable. */

export function singleAnalysisUrl(
  base: string,
  systemId: string,
  opts: { attrs?: string[]; b?: number; seed?: number; level?: number } = {},
): string {
  return `${base}/analysis/single/${systemId}${query({
    attrs: opts.attrs?.join(","),
    b: opts.b,
    seed: opts.seed,
    level: opts.level,
  })}`;
}

export function pairAnalysisUrl(
  base: string,
  a: string,
  b: string,
  attrs?: string[],
): string {
  return `${base}/analysis/pair/${a}/${b}${query({ attrs: attrs?.join(",") })}`;
}

export function biasUrl(base: string, datasets: string[], attrs?: string[]): string {
  return `${base}/analysis/bias${query({
    datasets: datasets.join(","),
    attrs: attrs?.join(","),
  })}`;
}

export function bucketErrorsUrl(
  base: string,
  systemId: string,
  bucket: string,
  page = 1,
  pageSize = 50,
): string {
  return `${base}/errors/${systemId}${query({ bucket, page, pageSize })}`;
}

export function commonErrorsUrl(
  base: string,
  systems: string[],
  page = 1,
  pageSize = 50,
): string {
  return `${base}/errors/common${query({ systems: systems.join(","), page, pageSize })}`;
}

export function uniqueErrorsUrl(
  base: string,
  a: string,
  b: string,
  page = 1,
  pageSize = 50,
): string {
  return `${base}/errors/unique${query({ a, b, page, pageSize })}`;
}

export function calibrationUrl(base: string, systemId: string, bins = 10): string {
  return `${base}/calibration/${systemId}${query({ bins })}`;
}

export class ApiClient {
  constructor(readonly base: string = "/api/v1") {}

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await fetch(url, init);
    if (!response.ok) {
      let code = `HTTP${response.status}`;
      let message = response.statusText;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  listTasks(): Promise<string[]> {
    return this.request(`${this.base}/tasks`);
  }

  listDatasets(task?: string): Promise<DatasetMeta[]> {
    return this.request(`${this.base}/datasets${query({ task })}`);
  }

  listSystems(dataset?: string): Promise<SystemMeta[]> {
    return this.request(`${this.base}/systems${query({ dataset })}`);
  }

  singleAnalysis(
    systemId: string,
    opts: { attrs?: string[]; b?: number; seed?: number; level?: number } = {},
  ): Promise<AnalysisReport> {
    return this.request(singleAnalysisUrl(this.base, systemId, opts));
  }

  pairAnalysis(a: string, b: string, attrs?: string[]): Promise<PairReport> {
    return this.request(pairAnalysisUrl(this.base, a, b, attrs));
  }

  biasAnalysis(datasets: string[], attrs?: string[]): Promise<BiasProfile> {
    return this.request(biasUrl(this.base, datasets, attrs));
  }

  combine(systemIds: string[]): Promise<AnalysisReport> {
    return this.request(`${this.base}/analysis/combine`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ systemIds }),
    });
  }

  bucketErrors(
    systemId: string,
    bucket: string,
    page = 1,
    pageSize = 50,
  ): Promise<ErrorPage> {
    return this.request(bucketErrorsUrl(this.base, systemId, bucket, page, pageSize));
  }

  commonErrors(systems: string[], page = 1, pageSize = 50): Promise<ErrorPage> {
    return this.request(commonErrorsUrl(this.base, systems, page, pageSize));
  }

  uniqueErrors(a: string, b: string, page = 1, pageSize = 50): Promise<ErrorPage> {
    return this.request(uniqueErrorsUrl(this.base, a, b, page, pageSize));
  }

  calibration(systemId: string, bins = 10): Promise<CalibrationReport> {
    return this.request(calibrationUrl(this.base, systemId, bins));
  }
}

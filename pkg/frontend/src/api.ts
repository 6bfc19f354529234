import type {
  AggregatesResponse,
  ApiSchema,
  ClassifyResult,
  SubmitResponse,
  Task,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface AggregatesQuery {
  question: string;
  task: Task;
  keyword?: string;
  dateFrom?: string;
  dateTo?: string;
  language?: string;
}

type FetchLike = typeof fetch;

/** Thin client for the documented /api/v1 endpoints. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok && response.status !== 202) {
      throw new ApiRequestError(
        response.status,
        body.error ?? "UnknownError",
        body.message ?? `request failed with ${response.status}`,
      );
    }
    return body as T;
  }

  getSchema(signal?: AbortSignal): Promise<ApiSchema> {
    return this.request<ApiSchema>("/api/v1/schema", { signal });
  }

  submit(text: string, language: string, task: Task, signal?: AbortSignal): Promise<SubmitResponse> {
    return this.request<SubmitResponse>("/api/v1/classify", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text, language, task }),
      signal,
    });
  }

  getResult(key: string, language: string, signal?: AbortSignal): Promise<ClassifyResult> {
    const params = new URLSearchParams({ language });
    return this.request<ClassifyResult>(
      `/api/v1/classify/${encodeURIComponent(key)}?${params}`,
      { signal },
    );
  }

  getAggregates(query: AggregatesQuery, signal?: AbortSignal): Promise<AggregatesResponse> {
    const params = new URLSearchParams({ question: query.question, task: query.task });
    if (query.keyword) params.set("keyword", query.keyword);
    if (query.dateFrom) params.set("date_from", query.dateFrom);
    if (query.dateTo) params.set("date_to", query.dateTo);
    if (query.language) params.set("language", query.language);
    return this.request<AggregatesResponse>(`/api/v1/aggregates?${params}`, { signal });
  }
}

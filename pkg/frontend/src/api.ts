import type {
  AggregateResponse,
  AnnotationIn,
  NextResponse,
  PostResponse,
  ProgressResponse,
  Sample,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Thin typed client for the annotation service. The fetch implementation
 * is injectable so tests can run against a scripted transport. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(path: string, init?: Parameters<FetchLike>[1]): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = "";
      try {
        detail = JSON.stringify(await response.json());
      } catch {
        detail = "(no body)";
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  next(annotatorId: string): Promise<NextResponse> {
    return this.request(`/api/samples/next?annotator_id=${encodeURIComponent(annotatorId)}`);
  }

  sample(sampleId: string, annotatorId: string): Promise<Sample> {
    return this.request(
      `/api/samples/${encodeURIComponent(sampleId)}?annotator_id=${encodeURIComponent(annotatorId)}`,
    );
  }

  submit(annotation: AnnotationIn): Promise<PostResponse> {
    return this.request(`/api/annotations`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(annotation),
    });
  }

  progress(): Promise<ProgressResponse> {
    return this.request(`/api/progress`);
  }

  aggregate(): Promise<AggregateResponse> {
    return this.request(`/api/aggregate`);
  }
}

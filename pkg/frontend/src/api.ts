import type {
  AnswerBody,
  DivergenceResponse,
  GraphResponse,
  OperatorResponse,
  PatternsResponse,
  PendingResponse,
  StateResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class StaleRequestError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "StaleRequestError";
  }
}

/** Thin client over the service JSON endpoints. The fetch implementation is
 * injectable so component tests can run against a mock service. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init)
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      throw new Error(`GET ${path} failed: ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  getState(actor: string): Promise<StateResponse> {
    return this.getJson(`/actors/${actor}/state`);
  }

  getGraph(actor: string): Promise<GraphResponse> {
    return this.getJson(`/actors/${actor}/graph`);
  }

  getOperator(actor: string): Promise<OperatorResponse> {
    return this.getJson(`/actors/${actor}/operator`);
  }

  getDivergence(actor: string): Promise<DivergenceResponse> {
    return this.getJson(`/actors/${actor}/divergence`);
  }

  getPending(actor: string): Promise<PendingResponse> {
    return this.getJson(`/actors/${actor}/clarifications/pending`);
  }

  getPatterns(): Promise<PatternsResponse> {
    return this.getJson(`/collective/patterns`);
  }

  async postAnswer(actor: string, requestId: string, body: AnswerBody): Promise<void> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/actors/${actor}/clarifications/${requestId}/answer`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }
    );
    if (resp.status === 409) {
      throw new StaleRequestError(`request ${requestId} is no longer pending`);
    }
    if (!resp.ok) {
      throw new Error(`answer submission failed: ${resp.status}`);
    }
  }
}

/**
 * Thin typed client for the review service REST API.
 *
 * Every non-2xx response carries `{code, message, detail}`; that shape is
 * surfaced as an ApiError so callers can branch on the stable code string
 * (SESSION_BUSY, INVALID_STATUS, ...) instead of parsing messages.
 */

import type {
  HistoryEvent,
  ProposalWire,
  SessionSummary,
  SubmitResponse,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }

  /** Human wording for the errors the review flow runs into routinely. */
  friendly(): string {
    if (this.code === "SESSION_BUSY") {
      return "previous request still processing";
    }
    if (this.status === 502) {
      return `${this.message} — you can retry`;
    }
    return this.message;
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let code = "HTTP_ERROR";
  let message = `${response.status} ${response.statusText}`;
  let detail: Record<string, unknown> = {};
  try {
    const body = await response.json();
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
    if (body.detail && typeof body.detail === "object") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status-line message
  }
  throw new ApiError(response.status, code, message, detail);
}

export class ProtocolApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    await raiseForStatus(response);
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json();
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return response.json();
  }

  health(): Promise<{ status: string; sessions: number }> {
    return this.getJson("/health");
  }

  createSession(protocolXml: string): Promise<SessionSummary> {
    return this.postJson("/sessions", { protocol_xml: protocolXml });
  }

  getSession(sessionId: string): Promise<SessionSummary> {
    return this.getJson(`/sessions/${sessionId}`);
  }

  submitText(sessionId: string, text: string): Promise<SubmitResponse> {
    return this.postJson(`/sessions/${sessionId}/requests`, { text });
  }

  submitStructured(
    sessionId: string,
    request: Record<string, unknown>,
  ): Promise<SubmitResponse> {
    return this.postJson(`/sessions/${sessionId}/requests`, request);
  }

  async listProposals(sessionId: string): Promise<ProposalWire[]> {
    const body = await this.getJson<{ proposals: ProposalWire[] }>(
      `/sessions/${sessionId}/proposals`,
    );
    return body.proposals;
  }

  decide(
    sessionId: string,
    proposalId: string,
    decision: "approve" | "reject",
  ): Promise<ProposalWire> {
    return this.postJson(
      `/sessions/${sessionId}/proposals/${proposalId}/decision`,
      { decision },
    );
  }

  /** Current protocol XML plus its content hash (the ETag). */
  async downloadProtocol(
    sessionId: string,
  ): Promise<{ xml: string; etag: string }> {
    const response = await this.request(`/sessions/${sessionId}/protocol`);
    return {
      xml: await response.text(),
      etag: response.headers.get("ETag") ?? "",
    };
  }

  async listHistory(sessionId: string): Promise<HistoryEvent[]> {
    const body = await this.getJson<{ events: HistoryEvent[] }>(
      `/sessions/${sessionId}/history`,
    );
    return body.events;
  }
}

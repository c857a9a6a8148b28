/**
 * Typed client for the question-answering service HTTP API.
 * Field names follow docs/api.md exactly; nothing here invents data.
 */

export interface Recognition {
  label: string;
  method: "rule" | "embedding" | "llm";
  score: number;
  is_new_intent: boolean;
}

export interface TraceStep {
  stage: string;
  detail: string;
}

export interface AnswerView {
  answer_text: string;
  rows: Record<string, string | number>[];
  recognition: Recognition;
  cql: string;
  render_method: "llm" | "template_fallback";
  trace: TraceStep[];
}

export interface AskResponse {
  answer: AnswerView;
  session_id: string;
  session_state: string;
}

export type FeedbackStep = "satisfied" | "cause" | "intent";

export interface FeedbackResponse {
  text: string;
  state: string;
}

export interface IntentInfo {
  label: string;
  example_count: number;
}

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

async function parseError(resp: Response): Promise<ApiError> {
  try {
    const body = await resp.json();
    return new ApiError(resp.status, body.code ?? "internal", body.message ?? resp.statusText, body.detail ?? {});
  } catch {
    return new ApiError(resp.status, "internal", resp.statusText);
  }
}

/** What the UI needs from the service; KbqaClient is the HTTP version. */
export interface QaApi {
  ask(question: string, sessionId?: string | null): Promise<AskResponse>;
  feedback(sessionId: string, step: FeedbackStep, value: boolean | string): Promise<FeedbackResponse>;
  intents(): Promise<IntentInfo[]>;
}

export class KbqaClient implements QaApi {
  constructor(private baseUrl: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(this.baseUrl + path);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  ask(question: string, sessionId?: string | null): Promise<AskResponse> {
    const body: Record<string, unknown> = { question };
    if (sessionId) body.session_id = sessionId;
    return this.post<AskResponse>("/ask", body);
  }

  feedback(sessionId: string, step: FeedbackStep, value: boolean | string): Promise<FeedbackResponse> {
    return this.post<FeedbackResponse>("/feedback", { session_id: sessionId, step, value });
  }

  async intents(): Promise<IntentInfo[]> {
    const body = await this.get<{ intents: IntentInfo[] }>("/intents");
    return body.intents;
  }

  health(): Promise<{ status: string; providers: Record<string, string> }> {
    return this.get("/healthz");
  }
}

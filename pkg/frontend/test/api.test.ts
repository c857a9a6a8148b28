import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, KbqaClient } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function sentBody(fetchMock: ReturnType<typeof vi.fn>, call = 0): unknown {
  const init = fetchMock.mock.calls[call]?.[1] as RequestInit;
  return JSON.parse(String(init.body));
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("KbqaClient", () => {
  it("posts /ask with the session id and unwraps the response", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({
        answer: {
          answer_text: "x", rows: [], cql: "", render_method: "llm", trace: [],
          recognition: { label: "a", method: "rule", score: 1, is_new_intent: false },
        },
        session_id: "s1",
        session_state: "answer_delivered",
      }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const client = new KbqaClient("http://api");
    const response = await client.ask("hello", "prev");
    expect(response.session_id).toBe("s1");
    expect(fetchMock).toHaveBeenCalledWith(
      "http://api/ask", expect.objectContaining({ method: "POST" }));
    expect(sentBody(fetchMock)).toEqual({ question: "hello", session_id: "prev" });
  });

  it("turns error bodies into ApiError with code and detail", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse({ code: "arity_mismatch", message: "nope", detail: { expected: 2, got: 1 } }, 400),
    ));
    const error = await new KbqaClient().ask("q").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(400);
    expect(error.code).toBe("arity_mismatch");
    expect(error.detail).toEqual({ expected: 2, got: 1 });
  });

  it("copes with non-JSON error bodies", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("boom", { status: 500 })));
    const error = await new KbqaClient().intents().catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.code).toBe("internal");
  });

  it("unwraps the intents list", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse({ intents: [{ label: "hq_location", example_count: 3 }] }),
    ));
    const intents = await new KbqaClient().intents();
    expect(intents).toEqual([{ label: "hq_location", example_count: 3 }]);
  });

  it("sends feedback steps verbatim", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ text: "ok", state: "closed" }));
    vi.stubGlobal("fetch", fetchMock);
    await new KbqaClient().feedback("s1", "cause", "intent");
    expect(sentBody(fetchMock)).toEqual({ session_id: "s1", step: "cause", value: "intent" });
  });
});

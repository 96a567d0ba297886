import { describe, expect, it } from "vitest";

import { ApiError, makeClient } from "../src/api.js";
import fixtures from "./fixtures/advisor.json";

interface Call {
  url: string;
  method: string;
  body: unknown;
}

function stubFetch(status: number, payload: unknown) {
  const calls: Call[] = [];
  const fetchFn = (async (url: RequestInfo | URL, init?: RequestInit) => {
    calls.push({
      url: String(url),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    return new Response(JSON.stringify(payload), { status });
  }) as typeof fetch;
  return { calls, fetchFn };
}

describe("makeClient", () => {
  it("posts session creation to /sessions", async () => {
    const { calls, fetchFn } = stubFetch(201, fixtures.create_response);
    const client = makeClient("", fetchFn);
    const view = await client.createSession(fixtures.create_request);
    expect(calls).toEqual([
      { url: "/sessions", method: "POST", body: fixtures.create_request },
    ]);
    expect(view.session_id).toBe(fixtures.create_response.session_id);
    expect(view.ranking).toEqual(fixtures.create_response.ranking);
  });

  it("addresses the documented endpoints", async () => {
    const { calls, fetchFn } = stubFetch(200, fixtures.session_view);
    const client = makeClient("http://lab:8000", fetchFn);
    await client.getSession("abc123");
    await client.getRecommendation("abc123");
    await client.voidRecommendation("abc123");
    await client.postObservation("abc123", { lifetime: null, tau: 1.2 });
    await client.exportSession("abc123");
    expect(calls.map((c) => `${c.method} ${c.url}`)).toEqual([
      "GET http://lab:8000/sessions/abc123",
      "GET http://lab:8000/sessions/abc123/recommendation",
      "DELETE http://lab:8000/sessions/abc123/recommendation",
      "POST http://lab:8000/sessions/abc123/observations",
      "GET http://lab:8000/sessions/abc123/export",
    ]);
    expect(calls[3].body).toEqual({ lifetime: null, tau: 1.2 });
  });

  it("surfaces 400 field errors", async () => {
    const { fetchFn } = stubFetch(400, fixtures.error_400);
    const client = makeClient("", fetchFn);
    try {
      await client.createSession(fixtures.create_request);
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      const api = error as ApiError;
      expect(api.status).toBe(400);
      expect(api.fieldErrors()).toEqual(fixtures.error_400.detail.errors);
    }
  });

  it("surfaces 422 and 409 details verbatim", async () => {
    let client = makeClient("", stubFetch(422, fixtures.error_422).fetchFn);
    await expect(
      client.postObservation("x", { lifetime: 1.3, tau: 1.2 }),
    ).rejects.toMatchObject({ status: 422, detail: fixtures.error_422.detail });

    client = makeClient("", stubFetch(409, fixtures.error_409).fetchFn);
    await expect(
      client.postObservation("x", { lifetime: 0.5, tau: 1.2 }),
    ).rejects.toMatchObject({ status: 409, detail: fixtures.error_409.detail });
  });
});

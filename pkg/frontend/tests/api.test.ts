// REST client behavior: url construction, request bodies, and typed errors.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ExperimentApi, ServiceError, Trial, isComplete } from "../src/api.js";

interface Call {
  url: string;
  init: RequestInit | undefined;
}

function stubFetch(status: number, text: string): Call[] {
  const calls: Call[] = [];
  vi.stubGlobal("fetch", async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(input), init });
    return {
      ok: status >= 200 && status < 300,
      status,
      text: async () => text,
    } as unknown as Response;
  });
  return calls;
}

const TRIAL: Trial = {
  trial_index: 3,
  face_id: "face-003",
  condition: "plain",
  stimulus_url: "/stimuli/3.png",
  remaining: 12,
};

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ExperimentApi", () => {
  it("trims trailing slashes and builds endpoint urls", async () => {
    const calls = stubFetch(200, JSON.stringify({ complete: true }));
    const api = new ExperimentApi("http://an.example:8000///");
    expect(api.server).toBe("http://an.example:8000");
    await api.nextTrial("abc");
    expect(calls[0]?.url).toBe("http://an.example:8000/sessions/abc/next");
    expect(api.stimulusUrl(TRIAL)).toBe("http://an.example:8000/stimuli/3.png");
  });

  it("posts a session request as json", async () => {
    const calls = stubFetch(
      201,
      JSON.stringify({
        session_id: "s",
        subject_id: "p9",
        design: "plain_race",
        block_order: [0],
        n_trials: 4,
        created_at: 1,
      }),
    );
    const api = new ExperimentApi("http://an.example");
    const info = await api.createSession("p9", "plain_race", 42);
    expect(info.session_id).toBe("s");
    const call = calls[0];
    if (call === undefined) throw new Error("no request made");
    expect(call.url).toBe("http://an.example/sessions");
    expect(call.init?.method).toBe("POST");
    expect(JSON.parse(String(call.init?.body))).toEqual({
      subject_id: "p9",
      design: "plain_race",
      seed: 42,
    });
  });

  it("posts a response submission as json", async () => {
    const calls = stubFetch(
      200,
      JSON.stringify({ trial_index: 3, recorded: true, remaining: 11, complete: false }),
    );
    const api = new ExperimentApi("http://an.example");
    const ack = await api.submit("sess", {
      trial_index: 3,
      choice: "North",
      rt_ms: 412.5,
      presented_at: 9001,
    });
    expect(ack.recorded).toBe(true);
    const call = calls[0];
    if (call === undefined) throw new Error("no request made");
    expect(call.url).toBe("http://an.example/sessions/sess/responses");
    expect(JSON.parse(String(call.init?.body))).toEqual({
      trial_index: 3,
      choice: "North",
      rt_ms: 412.5,
      presented_at: 9001,
    });
  });

  it("raises a typed error from a json error body", async () => {
    stubFetch(404, JSON.stringify({ error: "NoSuchSession", detail: "session gone" }));
    const api = new ExperimentApi("http://an.example");
    const p = api.nextTrial("gone");
    await expect(p).rejects.toBeInstanceOf(ServiceError);
    await expect(api.nextTrial("gone")).rejects.toMatchObject({
      status: 404,
      error: "NoSuchSession",
      detail: "session gone",
      message: "NoSuchSession: session gone",
    });
  });

  it("keeps the raw text when the error body is not json", async () => {
    stubFetch(502, "Bad Gateway");
    const api = new ExperimentApi("http://an.example");
    await expect(api.nextTrial("x")).rejects.toMatchObject({
      status: 502,
      error: "HttpError",
      detail: "Bad Gateway",
    });
  });

  it("flags the completion sentinel and nothing else", () => {
    expect(isComplete({ complete: true })).toBe(true);
    expect(isComplete(TRIAL)).toBe(false);
  });
});

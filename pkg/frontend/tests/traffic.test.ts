// Drives whole sessions through the real block runner against a scripted
// in-memory service, recording every request and response. Proves the client
// only ever touches the session endpoints, submits exactly the agreed fields,
// survives dropped connections without losing its place, and that no byte of
// traffic carries anything about correctness.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ExperimentApi } from "../src/api.js";
import { BlockSummary, Presenter, RunnerDeps, runBlock } from "../src/runner.js";
import { KeyEventLike } from "../src/timing.js";
import { FRAME, TestFrameClock } from "./support.js";

const SERVER = "http://svc.test";

interface Attempt {
  method: string;
  url: string;
  body: string | null;
  outcome: string; // "ok:<status>" or "network-error"
  response: string | null;
}

interface RecordedSubmission {
  trial_index: number;
  choice: string;
  rt_ms: number | null;
  presented_at: number;
}

interface FakeOpts {
  /** One condition per trial, served in order. */
  conditions: string[];
  /** trial_index -> connection drops before a response POST succeeds. */
  submitFailures?: Record<number, number>;
  /** trial_index -> connection drops before its stimulus GET succeeds. */
  stimulusFailures?: Record<number, number>;
}

function liteResponse(status: number, text: string): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    text: async () => text,
  } as unknown as Response;
}

class FakeService {
  attempts: Attempt[] = [];
  recorded: RecordedSubmission[] = [];
  readonly n: number;
  private cursor = 0;

  constructor(private opts: FakeOpts) {
    this.n = opts.conditions.length;
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? init.body : null;
    const path = new URL(url).pathname;
    const finish = (status: number, payload: unknown): Response => {
      const text = JSON.stringify(payload);
      this.attempts.push({ method, url, body, outcome: `ok:${status}`, response: text });
      return liteResponse(status, text);
    };
    const drop = (): never => {
      this.attempts.push({ method, url, body, outcome: "network-error", response: null });
      throw new TypeError("socket hang up");
    };

    if (method === "POST" && path === "/sessions") {
      const req = JSON.parse(body ?? "{}");
      return finish(201, {
        session_id: "sess-1",
        subject_id: req.subject_id,
        design: req.design,
        block_order: [0, 1, 2],
        n_trials: this.n,
        created_at: 1700000000,
      });
    }
    if (method === "GET" && path === "/sessions/sess-1/next") {
      if (this.cursor >= this.n) return finish(200, { complete: true });
      return finish(200, this.trial(this.cursor));
    }
    if (method === "POST" && path === "/sessions/sess-1/responses") {
      const req = JSON.parse(body ?? "{}") as RecordedSubmission;
      const drops = this.opts.submitFailures?.[req.trial_index] ?? 0;
      if (drops > 0) {
        this.opts.submitFailures![req.trial_index] = drops - 1;
        return drop();
      }
      if (req.trial_index !== this.cursor) {
        return finish(409, { error: "OutOfOrder", detail: `expected trial ${this.cursor}` });
      }
      this.recorded.push(req);
      this.cursor += 1;
      return finish(200, {
        trial_index: req.trial_index,
        recorded: true,
        remaining: this.n - this.cursor,
        complete: this.cursor >= this.n,
      });
    }
    const stim = /^\/stimuli\/(\d+)\.png$/.exec(path);
    if (method === "GET" && stim) {
      const idx = Number(stim[1]);
      const drops = this.opts.stimulusFailures?.[idx] ?? 0;
      if (drops > 0) {
        this.opts.stimulusFailures![idx] = drops - 1;
        return drop();
      }
      this.attempts.push({ method, url, body, outcome: "ok:200", response: "<png bytes>" });
      return liteResponse(200, "png bytes stand-in");
    }
    return finish(404, { error: "NotFound", detail: path });
  };

  private trial(i: number) {
    return {
      trial_index: i,
      face_id: `face-${String(i).padStart(3, "0")}`,
      condition: this.opts.conditions[i],
      stimulus_url: `/stimuli/${i}.png`,
      remaining: this.n - i,
    };
  }
}

interface TrialPlan {
  /** Press this many ms after onset; null means let it time out. */
  rt: number | null;
  key?: "n" | "s";
}

interface StageEvent {
  kind: "mask" | "fixation" | "stimulus" | "clear" | "break" | "pause";
  detail: string;
  at: number;
}

interface SessionRun {
  summary: BlockSummary;
  events: StageEvent[];
  pauses: number;
  svc: FakeService;
}

async function runSession(
  svc: FakeService,
  plans: TrialPlan[],
  intertrialMs = 40,
): Promise<SessionRun> {
  vi.stubGlobal("fetch", svc.fetch);
  const clock = new TestFrameClock();
  const api = new ExperimentApi(SERVER);
  const session = await api.createSession("s01", "occlusion", 7);

  const events: StageEvent[] = [];
  const keySink: { fn: ((e: KeyEventLike) => void) | null } = { fn: null };
  let stimulusAt: number | null = null;
  let plan: TrialPlan = { rt: null };
  let keyed = true;

  const presenter: Presenter<string> = {
    mask: (trial) => {
      events.push({ kind: "mask", detail: String(trial.trial_index), at: clock.now() });
      plan = plans[trial.trial_index] ?? { rt: null };
      stimulusAt = null;
      keyed = false;
    },
    fixation: () => events.push({ kind: "fixation", detail: "", at: clock.now() }),
    stimulus: (trial) => {
      events.push({ kind: "stimulus", detail: String(trial.trial_index), at: clock.now() });
      stimulusAt = clock.now();
    },
    clear: () => events.push({ kind: "clear", detail: "", at: clock.now() }),
    blockBreak: async (condition) => {
      events.push({ kind: "break", detail: condition, at: clock.now() });
    },
  };

  let pauses = 0;
  const deps: RunnerDeps<string> = {
    clock,
    presenter,
    preload: async (trial) => {
      const resp = await fetch(api.stimulusUrl(trial));
      if (!resp.ok) throw new Error(`stimulus fetch failed: ${resp.status}`);
      return resp.text();
    },
    keys: (l) => {
      keySink.fn = l;
      return () => {
        keySink.fn = null;
      };
    },
    pauseForRetry: async (err) => {
      pauses += 1;
      events.push({
        kind: "pause",
        detail: err instanceof Error ? err.message : String(err),
        at: clock.now(),
      });
      if (pauses > 50) throw new Error("retry loop runaway");
    },
    intertrialMs,
  };

  let summary: BlockSummary | null = null;
  let failure: unknown = null;
  void runBlock(api, session.session_id, deps).then(
    (s) => {
      summary = s;
    },
    (e) => {
      failure = e;
    },
  );
  for (let steps = 0; summary === null && failure === null; steps++) {
    if (steps > 60000) throw new Error("session never finished");
    await clock.step();
    if (!keyed && plan.rt !== null && stimulusAt !== null && clock.now() >= stimulusAt + plan.rt) {
      keySink.fn?.({ key: plan.key ?? "n", time: stimulusAt + plan.rt });
      keyed = true;
    }
  }
  if (failure !== null) throw failure;
  if (summary === null) throw new Error("unreachable");
  return { summary, events, pauses, svc };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("block runner traffic", () => {
  it("completes a session without a trace of correctness in any byte of traffic", async () => {
    const svc = new FakeService({
      conditions: ["plain", "plain", "plain", "eye", "eye", "eye", "mouth", "mouth", "mouth"],
    });
    const plans: TrialPlan[] = [
      { rt: 180, key: "n" },
      { rt: 260, key: "s" },
      { rt: 90, key: "n" },
      { rt: 140, key: "s" },
      { rt: null },
      { rt: 220, key: "n" },
      { rt: 75, key: "s" },
      { rt: 310, key: "n" },
      { rt: 130, key: "s" },
    ];
    const { summary, events, pauses } = await runSession(svc, plans);

    // every trial reached the service exactly once, in order
    expect(svc.recorded.map((r) => r.trial_index)).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8]);
    for (const [i, rec] of svc.recorded.entries()) {
      const plan = plans[i];
      if (plan === undefined) throw new Error("plan missing");
      if (plan.rt === null) {
        expect(rec.choice).toBe("timeout");
        expect(rec.rt_ms).toBeNull();
      } else {
        expect(rec.choice).toBe(plan.key === "n" ? "North" : "South");
        expect(rec.rt_ms).not.toBeNull();
        expect(Math.abs((rec.rt_ms as number) - plan.rt)).toBeLessThanOrEqual(FRAME);
        expect(rec.rt_ms as number).toBeGreaterThanOrEqual(0);
        expect(rec.rt_ms as number).toBeLessThanOrEqual(5000);
      }
      // presented_at matches the moment the stimulus hit the canvas
      const shown = events.find((e) => e.kind === "stimulus" && e.detail === String(i));
      expect(shown).toBeDefined();
      expect(rec.presented_at).toBe(shown?.at);
    }

    // request bodies carry exactly the agreed fields
    for (const a of svc.attempts) {
      if (a.method === "POST" && a.url.endsWith("/sessions")) {
        expect(Object.keys(JSON.parse(a.body ?? "{}")).sort()).toEqual([
          "design",
          "seed",
          "subject_id",
        ]);
      }
      if (a.method === "POST" && a.url.endsWith("/responses")) {
        expect(Object.keys(JSON.parse(a.body ?? "{}")).sort()).toEqual([
          "choice",
          "presented_at",
          "rt_ms",
          "trial_index",
        ]);
      }
    }

    // the client only ever touches the session and stimulus endpoints
    const allowed = [
      /\/sessions$/,
      /\/sessions\/sess-1\/next$/,
      /\/sessions\/sess-1\/responses$/,
      /\/stimuli\/\d+\.png$/,
    ];
    for (const a of svc.attempts) {
      expect(allowed.some((re) => re.test(new URL(a.url).pathname))).toBe(true);
    }
    expect(svc.attempts.some((a) => a.url.includes("export"))).toBe(false);

    // no byte of traffic mentions correctness
    const wire = JSON.stringify(svc.attempts);
    expect(/correct/i.test(wire)).toBe(false);

    // block breaks at each condition change, and only there
    expect(events.filter((e) => e.kind === "break").map((e) => e.detail)).toEqual([
      "eye",
      "mouth",
    ]);

    // the next stimulus is fetched during the previous intertrial gap
    const order = svc.attempts.map((a) => `${a.method} ${new URL(a.url).pathname}`);
    const post2 = order.indexOf("POST /sessions/sess-1/responses");
    const get3 = order.indexOf("GET /stimuli/3.png");
    const posts = order
      .map((s, i) => (s === "POST /sessions/sess-1/responses" ? i : -1))
      .filter((i) => i >= 0);
    expect(post2).toBeGreaterThanOrEqual(0);
    expect(get3).toBeGreaterThan(posts[2] ?? Infinity);
    expect(get3).toBeLessThan(posts[3] ?? -1);

    // the intertrial gap separates clear from the next mask
    const masks = events.filter((e) => e.kind === "mask");
    const clears = events.filter((e) => e.kind === "clear");
    for (let i = 1; i < masks.length; i++) {
      const mask = masks[i];
      const clear = clears[i - 1];
      if (mask === undefined || clear === undefined) throw new Error("event missing");
      expect(mask.at - clear.at).toBeGreaterThanOrEqual(40 - 1e-9);
    }

    expect(pauses).toBe(0);
    expect(summary.trials).toBe(9);
    expect(summary.answered).toBe(8);
    expect(summary.timeouts).toBe(1);
    const rts = plans.filter((p) => p.rt !== null).map((p) => p.rt as number);
    expect(summary.mean_rt_ms).toBeCloseTo(rts.reduce((a, b) => a + b, 0) / rts.length, 6);
  });

  it("pauses on a dropped submission and resumes the same trial", async () => {
    const svc = new FakeService({
      conditions: ["plain", "plain", "plain"],
      submitFailures: { 1: 1 },
    });
    const plans: TrialPlan[] = [
      { rt: 50, key: "n" },
      { rt: 60, key: "s" },
      { rt: 70, key: "n" },
    ];
    const { summary, pauses } = await runSession(svc, plans);

    expect(pauses).toBe(1);
    expect(svc.recorded.map((r) => r.trial_index)).toEqual([0, 1, 2]);

    const tries = svc.attempts.filter(
      (a) =>
        a.method === "POST" &&
        a.url.endsWith("/responses") &&
        (JSON.parse(a.body ?? "{}") as RecordedSubmission).trial_index === 1,
    );
    expect(tries.map((a) => a.outcome)).toEqual(["network-error", "ok:200"]);
    expect(tries[0]?.body).toBe(tries[1]?.body);

    expect(summary.trials).toBe(3);
    expect(summary.answered).toBe(3);
  });

  it("pauses on a dropped stimulus fetch and refetches it", async () => {
    const svc = new FakeService({
      conditions: ["plain", "plain", "plain"],
      stimulusFailures: { 1: 1 },
    });
    const plans: TrialPlan[] = [
      { rt: 50, key: "n" },
      { rt: 60, key: "s" },
      { rt: 70, key: "n" },
    ];
    const { summary, pauses } = await runSession(svc, plans);

    expect(pauses).toBe(1);
    const tries = svc.attempts.filter((a) => new URL(a.url).pathname === "/stimuli/1.png");
    expect(tries.map((a) => a.outcome)).toEqual(["network-error", "ok:200"]);
    expect(svc.recorded.map((r) => r.trial_index)).toEqual([0, 1, 2]);
    expect(summary.trials).toBe(3);
  });
});

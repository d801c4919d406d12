// REST client for the experiment service. The service never sends the
// client anything about correctness; nothing here asks for it either
// (the export endpoint is operator-only and deliberately absent).

export type Choice = "North" | "South" | "timeout";

export interface SessionInfo {
  session_id: string;
  subject_id: string;
  design: string;
  block_order: number[];
  n_trials: number;
  created_at: number;
}

export interface Trial {
  trial_index: number;
  face_id: string;
  condition: string;
  stimulus_url: string;
  remaining: number;
}

export type NextTrial = Trial | { complete: true };

export interface SubmitAck {
  trial_index: number;
  recorded: boolean;
  remaining: number;
  complete: boolean;
}

export interface Submission {
  trial_index: number;
  choice: Choice;
  rt_ms: number | null;
  presented_at: number;
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public error: string,
    public detail: string,
  ) {
    super(`${error}: ${detail}`);
  }
}

async function call<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const text = await resp.text();
  if (!resp.ok) {
    let error = "HttpError";
    let detail = text;
    try {
      const body = JSON.parse(text);
      error = body.error ?? error;
      detail = body.detail ?? detail;
    } catch {
      // non-JSON error body; keep raw text as detail
    }
    throw new ServiceError(resp.status, error, detail);
  }
  return JSON.parse(text) as T;
}

export class ExperimentApi {
  constructor(readonly server: string) {
    this.server = server.replace(/\/+$/, "");
  }

  createSession(subjectId: string, design: string, seed: number): Promise<SessionInfo> {
    return call<SessionInfo>(`${this.server}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ subject_id: subjectId, design, seed }),
    });
  }

  nextTrial(sessionId: string): Promise<NextTrial> {
    return call<NextTrial>(`${this.server}/sessions/${sessionId}/next`);
  }

  submit(sessionId: string, body: Submission): Promise<SubmitAck> {
    return call<SubmitAck>(`${this.server}/sessions/${sessionId}/responses`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  stimulusUrl(trial: Trial): string {
    return this.server + trial.stimulus_url;
  }
}

export function isComplete(t: NextTrial): t is { complete: true } {
  return "complete" in t && t.complete === true;
}

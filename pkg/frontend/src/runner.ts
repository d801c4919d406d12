// Block loop: next trial -> present -> capture key -> submit, with the next
// stimulus preloaded during the intertrial gap. Network failures pause on a
// retry screen and resume on the same trial (the service re-serves the
// in-flight trial, so nothing is lost).

import { ExperimentApi, isComplete, SubmitAck, Trial } from "./api.js";
import {
  DEFAULT_INTERTRIAL_MS,
  FrameClock,
  KeyEventLike,
  TrialMachine,
  waitMs,
} from "./timing.js";

export interface Presenter<S> {
  /** Called at each phase's first frame. A fresh mask is expected per trial. */
  mask(trial: Trial): void;
  fixation(): void;
  stimulus(trial: Trial, stim: S): void;
  clear(): void;
  /** Optional pause between occlusion blocks (condition changes). */
  blockBreak?(condition: string): Promise<void>;
}

export interface RunnerDeps<S> {
  clock: FrameClock;
  presenter: Presenter<S>;
  /** Fetch a drawable stimulus; called during the previous intertrial when
   * possible. */
  preload(trial: Trial): Promise<S>;
  /** Register a raw key listener; returns the detach function. */
  keys(listener: (e: KeyEventLike) => void): () => void;
  /** Shown on network failure; resolving retries the failed call. */
  pauseForRetry(err: unknown): Promise<void>;
  intertrialMs?: number;
}

export interface BlockSummary {
  trials: number;
  answered: number;
  timeouts: number;
  mean_rt_ms: number | null;
}

async function withRetry<T>(op: () => Promise<T>, deps: { pauseForRetry(e: unknown): Promise<void> }): Promise<T> {
  for (;;) {
    try {
      return await op();
    } catch (err) {
      await deps.pauseForRetry(err);
    }
  }
}

export async function runBlock<S>(
  api: ExperimentApi,
  sessionId: string,
  deps: RunnerDeps<S>,
): Promise<BlockSummary> {
  const intertrial = deps.intertrialMs ?? DEFAULT_INTERTRIAL_MS;
  const summary: BlockSummary = { trials: 0, answered: 0, timeouts: 0, mean_rt_ms: null };
  let rtSum = 0;
  let lastCondition: string | null = null;

  let upcoming: Trial | null = null;
  let upcomingStim: Promise<S> | null = null;

  for (;;) {
    let trial: Trial;
    let stimP: Promise<S>;
    if (upcoming !== null && upcomingStim !== null) {
      trial = upcoming;
      stimP = upcomingStim;
      upcoming = null;
      upcomingStim = null;
    } else {
      const next = await withRetry(() => api.nextTrial(sessionId), deps);
      if (isComplete(next)) break;
      trial = next;
      stimP = deps.preload(trial);
    }
    // a rejected preload must be re-requested, not re-awaited
    let stim: S;
    try {
      stim = await stimP;
    } catch (err) {
      await deps.pauseForRetry(err);
      stim = await withRetry(() => deps.preload(trial), deps);
    }

    if (lastCondition !== null && trial.condition !== lastCondition) {
      await deps.presenter.blockBreak?.(trial.condition);
    }
    lastCondition = trial.condition;

    const machine = new TrialMachine(deps.clock, {
      onPhase: (phase) => {
        if (phase === "noise_mask") deps.presenter.mask(trial);
        else if (phase === "fixation") deps.presenter.fixation();
        else deps.presenter.stimulus(trial, stim);
      },
    });
    const detach = deps.keys((e) => machine.key(e));
    const result = await machine.run();
    detach();
    deps.presenter.clear();

    summary.trials += 1;
    if (result.choice === "timeout") {
      summary.timeouts += 1;
    } else {
      summary.answered += 1;
      rtSum += result.rt_ms as number;
    }

    // intertrial: submit and line up the next stimulus while the gap runs
    const gap = waitMs(deps.clock, intertrial);
    const ack: SubmitAck = await withRetry(
      () =>
        api.submit(sessionId, {
          trial_index: trial.trial_index,
          choice: result.choice,
          rt_ms: result.rt_ms,
          presented_at: result.onset,
        }),
      deps,
    );
    if (!ack.complete) {
      const next = await withRetry(() => api.nextTrial(sessionId), deps);
      if (!isComplete(next)) {
        upcoming = next;
        upcomingStim = deps.preload(next);
      }
    }
    await gap;
    if (ack.complete) break;
  }

  if (summary.answered > 0) summary.mean_rt_ms = rtSum / summary.answered;
  return summary;
}

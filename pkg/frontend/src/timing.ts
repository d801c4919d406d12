// Frame-locked trial sequencing: noise mask and fixation for 500 ms each,
// then the stimulus until a keypress or the 5000 ms deadline. Phases advance
// on display refresh callbacks with monotonic timestamps, so measured
// durations land within one frame of the plan; reaction times come from the
// key event's own timestamp, not the next frame.

export const MASK_MS = 500;
export const FIXATION_MS = 500;
export const STIMULUS_DEADLINE_MS = 5000;
export const DEFAULT_INTERTRIAL_MS = 800;

export type Phase = "noise_mask" | "fixation" | "stimulus";

export type ResponseChoice = "North" | "South";

const KEY_CHOICES: Record<string, ResponseChoice> = { n: "North", s: "South" };

export interface FrameClock {
  now(): number;
  requestFrame(cb: (t: number) => void): number;
  cancelFrame(id: number): void;
}

export interface KeyEventLike {
  key: string;
  time: number;
}

export interface PhaseHooks {
  onPhase?: (phase: Phase, at: number) => void;
}

export interface TrialResult {
  choice: ResponseChoice | "timeout";
  rt_ms: number | null;
  onset: number;
  mask_ms: number;
  fixation_ms: number;
  stimulus_ms: number;
}

/** Browser clock; callers outside a browser inject their own. */
export function browserClock(): FrameClock {
  return {
    now: () => performance.now(),
    requestFrame: (cb) => requestAnimationFrame(cb),
    cancelFrame: (id) => cancelAnimationFrame(id),
  };
}

export class TrialMachine {
  private phase: Phase | "idle" | "done" = "idle";
  private started = false;
  private phaseStart = 0;
  private maskMs = 0;
  private fixationMs = 0;
  private frameId = 0;
  private resolve: ((r: TrialResult) => void) | null = null;
  onset = 0;

  constructor(
    private clock: FrameClock,
    private hooks: PhaseHooks = {},
  ) {}

  /** Resolves at keypress or deadline; never rejects. */
  run(): Promise<TrialResult> {
    if (this.started) throw new Error("trial already started");
    this.started = true;
    return new Promise((resolve) => {
      this.resolve = resolve;
      this.frameId = this.clock.requestFrame(this.firstFrame);
    });
  }

  /** Feed a key event. Ignored outside the stimulus phase; only n/s count. */
  key(e: KeyEventLike): void {
    if (this.phase !== "stimulus") return;
    const choice = KEY_CHOICES[e.key];
    if (choice === undefined) return;
    const rt = e.time - this.onset;
    this.finish(choice, rt, e.time);
  }

  private firstFrame = (t: number) => {
    this.phase = "noise_mask";
    this.phaseStart = t;
    this.hooks.onPhase?.("noise_mask", t);
    this.frameId = this.clock.requestFrame(this.tick);
  };

  private tick = (t: number) => {
    const elapsed = t - this.phaseStart;
    if (this.phase === "noise_mask") {
      if (elapsed >= MASK_MS) {
        this.maskMs = elapsed;
        this.phase = "fixation";
        this.phaseStart = t;
        this.hooks.onPhase?.("fixation", t);
      }
    } else if (this.phase === "fixation") {
      if (elapsed >= FIXATION_MS) {
        this.fixationMs = elapsed;
        this.phase = "stimulus";
        this.phaseStart = t;
        this.onset = t;
        this.hooks.onPhase?.("stimulus", t);
      }
    } else if (this.phase === "stimulus") {
      if (elapsed >= STIMULUS_DEADLINE_MS) {
        this.finish("timeout", null, t);
        return;
      }
    }
    this.frameId = this.clock.requestFrame(this.tick);
  };

  private finish(choice: ResponseChoice | "timeout", rt: number | null, at: number) {
    this.clock.cancelFrame(this.frameId);
    this.phase = "done";
    const resolve = this.resolve;
    this.resolve = null;
    resolve?.({
      choice,
      rt_ms: rt,
      onset: this.onset,
      mask_ms: this.maskMs,
      fixation_ms: this.fixationMs,
      stimulus_ms: at - this.onset,
    });
  }
}

/** Frame-locked wait, for the intertrial gap. Resolves at the first frame
 * past `ms`. */
export function waitMs(clock: FrameClock, ms: number): Promise<number> {
  const start = clock.now();
  return new Promise((resolve) => {
    const tick = (t: number) => {
      if (t - start >= ms) resolve(t);
      else clock.requestFrame(tick);
    };
    clock.requestFrame(tick);
  });
}

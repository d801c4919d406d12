// Browser entry point. Configuration comes from query parameters:
//   ?server=http://localhost:8000&subject=s01&design=plain_race&seed=7
// Optional: &intertrial=800 (ms). Key event timestamps share the
// performance.now() origin, so reaction times subtract cleanly.

import { ExperimentApi, SessionInfo } from "./api.js";
import { runBlock } from "./runner.js";
import { browserClock, KeyEventLike } from "./timing.js";
import {
  blockBreakScreen,
  buildStage,
  clearCanvas,
  drawFixation,
  drawMask,
  drawStimulus,
  loadStimulus,
  promptFullscreen,
  retryScreen,
  showMessage,
} from "./ui.js";

interface Config {
  server: string;
  subject: string;
  design: string;
  seed: number;
  intertrialMs?: number;
}

function readConfig(): Config {
  const q = new URLSearchParams(window.location.search);
  const cfg: Config = {
    server: q.get("server") ?? window.location.origin,
    subject: q.get("subject") ?? "anon",
    design: q.get("design") ?? "plain_race",
    seed: Number(q.get("seed") ?? "0"),
  };
  const gap = q.get("intertrial");
  if (gap !== null) cfg.intertrialMs = Number(gap);
  return cfg;
}

function keyFeed(listener: (e: KeyEventLike) => void): () => void {
  const onKey = (ev: KeyboardEvent) => listener({ key: ev.key, time: ev.timeStamp });
  window.addEventListener("keydown", onKey);
  return () => window.removeEventListener("keydown", onKey);
}

async function main(): Promise<void> {
  const cfg = readConfig();
  const stage = buildStage(document.body);
  const api = new ExperimentApi(cfg.server);

  await promptFullscreen(stage);

  let session: SessionInfo;
  for (;;) {
    try {
      session = await api.createSession(cfg.subject, cfg.design, cfg.seed);
      break;
    } catch (err) {
      await retryScreen(stage, err);
    }
  }

  const summary = await runBlock<HTMLImageElement>(api, session.session_id, {
    clock: browserClock(),
    presenter: {
      mask: () => drawMask(stage),
      fixation: () => drawFixation(stage),
      stimulus: (_trial, stim) => drawStimulus(stage, stim),
      clear: () => clearCanvas(stage),
      blockBreak: (condition) => blockBreakScreen(stage, condition),
    },
    preload: (trial) => loadStimulus(api.stimulusUrl(trial)),
    keys: keyFeed,
    pauseForRetry: (err) => retryScreen(stage, err),
    ...(cfg.intertrialMs !== undefined ? { intertrialMs: cfg.intertrialMs } : {}),
  });

  const rt = summary.mean_rt_ms === null ? "n/a" : `${summary.mean_rt_ms.toFixed(0)} ms`;
  showMessage(
    stage,
    `<p>All done. ${summary.trials} trials, ${summary.answered} answered, ` +
      `${summary.timeouts} timed out.</p>` +
      `<p>Mean response time: ${rt}.</p>` +
      "<p>Thank you. You may close this window.</p>",
  );
}

void main();

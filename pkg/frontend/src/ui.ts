// DOM presentation: a fixed-size canvas on a black stage. The stimulus is
// drawn at its native size; nothing about correctness is ever rendered.

import { saltPepperMask } from "./mask.js";

export const STIM_W = 320;
export const STIM_H = 400;

export interface Stage {
  root: HTMLDivElement;
  canvas: HTMLCanvasElement;
  ctx: CanvasRenderingContext2D;
  message: HTMLDivElement;
}

export function buildStage(parent: HTMLElement): Stage {
  const root = document.createElement("div");
  root.style.position = "fixed";
  root.style.inset = "0";
  root.style.background = "#000";
  root.style.display = "flex";
  root.style.alignItems = "center";
  root.style.justifyContent = "center";

  const canvas = document.createElement("canvas");
  canvas.width = STIM_W;
  canvas.height = STIM_H;
  canvas.style.width = `${STIM_W}px`;
  canvas.style.height = `${STIM_H}px`;
  root.appendChild(canvas);

  const message = document.createElement("div");
  message.style.position = "absolute";
  message.style.color = "#ddd";
  message.style.font = "18px system-ui, sans-serif";
  message.style.textAlign = "center";
  message.style.maxWidth = "34em";
  message.style.display = "none";
  root.appendChild(message);

  parent.appendChild(root);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  ctx.imageSmoothingEnabled = false;
  return { root, canvas, ctx, message };
}

export function clearCanvas(stage: Stage): void {
  stage.ctx.fillStyle = "#000";
  stage.ctx.fillRect(0, 0, STIM_W, STIM_H);
}

export function drawMask(stage: Stage): void {
  const mask = saltPepperMask(STIM_W, STIM_H);
  const img = stage.ctx.createImageData(STIM_W, STIM_H);
  for (let i = 0; i < mask.length; i++) {
    const v = mask[i] as number;
    img.data[4 * i] = v;
    img.data[4 * i + 1] = v;
    img.data[4 * i + 2] = v;
    img.data[4 * i + 3] = 255;
  }
  stage.ctx.putImageData(img, 0, 0);
}

export function drawFixation(stage: Stage): void {
  clearCanvas(stage);
  const ctx = stage.ctx;
  const cx = STIM_W / 2;
  const cy = STIM_H / 2;
  ctx.strokeStyle = "#fff";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(cx - 12, cy);
  ctx.lineTo(cx + 12, cy);
  ctx.moveTo(cx, cy - 12);
  ctx.lineTo(cx, cy + 12);
  ctx.stroke();
}

export function drawStimulus(stage: Stage, image: ImageBitmap | HTMLImageElement): void {
  clearCanvas(stage);
  const w = image.width;
  const h = image.height;
  stage.ctx.drawImage(image, (STIM_W - w) / 2, (STIM_H - h) / 2);
}

export function showMessage(stage: Stage, html: string): void {
  stage.canvas.style.visibility = "hidden";
  stage.message.innerHTML = html;
  stage.message.style.display = "block";
}

export function hideMessage(stage: Stage): void {
  stage.message.style.display = "none";
  stage.canvas.style.visibility = "visible";
}

/** Message screen that resolves on a keypress. */
export function waitForKey(stage: Stage, html: string, keys: string[]): Promise<string> {
  showMessage(stage, html);
  return new Promise((resolve) => {
    const onKey = (e: KeyboardEvent) => {
      if (keys.length > 0 && !keys.includes(e.key)) return;
      window.removeEventListener("keydown", onKey);
      hideMessage(stage);
      resolve(e.key);
    };
    window.addEventListener("keydown", onKey);
  });
}

export async function promptFullscreen(stage: Stage): Promise<void> {
  await waitForKey(
    stage,
    "<p>This task runs fullscreen on a black background.</p>" +
      "<p>You will see a noise mask, then a cross, then a face. " +
      "Press <b>n</b> for North or <b>s</b> for South.</p>" +
      "<p>Press any key to begin.</p>",
    [],
  );
  try {
    await document.documentElement.requestFullscreen();
  } catch {
    // user or browser declined; the task still runs windowed
  }
}

export function loadStimulus(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`failed to load ${url}`));
    img.src = url;
  });
}

export function retryScreen(stage: Stage, err: unknown): Promise<void> {
  const detail = err instanceof Error ? err.message : String(err);
  return waitForKey(
    stage,
    `<p>Connection problem: ${escapeHtml(detail)}</p>` +
      "<p>Your place is saved. Press <b>r</b> to retry.</p>",
    ["r"],
  ).then(() => undefined);
}

export function blockBreakScreen(stage: Stage, condition: string): Promise<void> {
  return waitForKey(
    stage,
    `<p>Block complete. Next block: <b>${escapeHtml(condition)}</b>.</p>` +
      "<p>Take a short break. Press any key to continue.</p>",
    [],
  ).then(() => undefined);
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

// Shared test doubles: a deterministic frame clock driven by the test, and a
// small seeded RNG so every run sees the same trial plan.

import { FrameClock } from "../src/timing.js";

export const FRAME = 1000 / 60;

export class TestFrameClock implements FrameClock {
  private t = 0;
  private nextId = 1;
  private pending = new Map<number, (t: number) => void>();

  now(): number {
    return this.t;
  }

  requestFrame(cb: (t: number) => void): number {
    const id = this.nextId++;
    this.pending.set(id, cb);
    return id;
  }

  cancelFrame(id: number): void {
    this.pending.delete(id);
  }

  /** Advance one frame: fire callbacks registered before it, then drain
   * pending promise chains. A callback registered by a firing callback waits
   * for the next frame, as with requestAnimationFrame. */
  async step(dt: number = FRAME): Promise<void> {
    this.t += dt;
    const due = Array.from(this.pending.values());
    this.pending.clear();
    for (const cb of due) cb(this.t);
    for (let i = 0; i < 10; i++) await Promise.resolve();
  }
}

/** mulberry32: tiny deterministic PRNG over [0, 1). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let x = a;
    x = Math.imul(x ^ (x >>> 15), x | 1);
    x ^= x + Math.imul(x ^ (x >>> 7), x | 61);
    return ((x ^ (x >>> 14)) >>> 0) / 4294967296;
  };
}

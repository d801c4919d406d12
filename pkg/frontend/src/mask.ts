// Salt-and-pepper noise masks. A fresh mask is sampled for every trial so
// no two consecutive masks are identical.

export type Rng = () => number;

/** One byte per pixel, 0 or 255. */
export function saltPepperMask(
  width: number,
  height: number,
  density = 0.5,
  rng: Rng = Math.random,
): Uint8Array {
  if (width < 1 || height < 1) throw new Error(`bad mask size ${width}x${height}`);
  if (!(density > 0 && density < 1)) throw new Error(`density ${density} outside (0, 1)`);
  const out = new Uint8Array(width * height);
  for (let i = 0; i < out.length; i++) {
    out[i] = rng() < density ? 255 : 0;
  }
  return out;
}

export function masksEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) return false;
  }
  return true;
}

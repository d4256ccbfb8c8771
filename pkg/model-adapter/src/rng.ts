/** Deterministic helpers for everything randomness touches outside the
 * network itself (layer initializers carry their own seeds). */

/** splitmix32: tiny seeded PRNG, uniform in [0, 1). */
export function makeRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x9e3779b9) >>> 0;
    let z = state;
    z = Math.imul(z ^ (z >>> 16), 0x21f0aaad);
    z = Math.imul(z ^ (z >>> 15), 0x735a2d97);
    z = z ^ (z >>> 15);
    return (z >>> 0) / 4294967296;
  };
}

/** In-place Fisher-Yates shuffle of index order, returned as a new array. */
export function shuffledIndices(n: number, rng: () => number): number[] {
  const idx = Array.from({ length: n }, (_, i) => i);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [idx[i], idx[j]] = [idx[j], idx[i]];
  }
  return idx;
}

/** Distinct per-layer seeds derived from one master seed. */
export function layerSeeds(seed: number, count: number): number[] {
  const rng = makeRng(seed ^ 0x5f3759df);
  return Array.from({ length: count }, () => Math.floor(rng() * 2 ** 31));
}

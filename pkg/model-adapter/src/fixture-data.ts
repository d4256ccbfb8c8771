import { Axis, SpectrumRecord } from './data.js';
import { makeRng } from './rng.js';

/** Toy three-class problem on a short axis: a band on the left, a band on
 * the right, or nothing. Small enough to train in seconds, separable enough
 * that the fixture model's answers are unambiguous. */

export const TINY_AXIS: Axis = { start: 0, end: 100, n_bins: 101 };
export const TINY_SEED = 5;

const BAND_CENTERS = [25, 75];
const BAND_WIDTH = 3;
const BAND_AMPLITUDE = 2;

/** Flat baseline of 1 with an optional gaussian band on top. */
export function tinyClassSpectrum(label: number): number[] {
  const values = new Array<number>(TINY_AXIS.n_bins).fill(1);
  if (label < BAND_CENTERS.length) {
    const center = BAND_CENTERS[label];
    for (let i = 0; i < values.length; i++) {
      values[i] += BAND_AMPLITUDE * Math.exp(-0.5 * ((i - center) / BAND_WIDTH) ** 2);
    }
  }
  return values;
}

function gaussian(rng: () => number): number {
  // Box-Muller; rng() is uniform in [0, 1)
  const u = 1 - rng();
  const v = rng();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}

export function tinyRecords(perClass: number, noiseSd: number, seed: number): SpectrumRecord[] {
  const rng = makeRng(seed);
  const records: SpectrumRecord[] = [];
  for (let label = 0; label < 3; label++) {
    const clean = tinyClassSpectrum(label);
    for (let i = 0; i < perClass; i++) {
      const noisy = clean.map((v) => v + noiseSd * gaussian(rng));
      records.push({
        id: `tiny-${label}-${i}`,
        label,
        intensities: Float32Array.from(noisy),
        groundTruth: null,
      });
    }
  }
  return records;
}

function round4(values: number[]): number[] {
  return values.map((v) => Math.round(v * 1e4) / 1e4);
}

/** The classify payloads recorded in the transcript, in send order. */
export function probeSpectra(): Array<{ note: string; intensities: number[] }> {
  const rng = makeRng(99);
  const noisyLeft = tinyClassSpectrum(0).map((v) => v + 0.05 * gaussian(rng));
  const noisyRight = tinyClassSpectrum(1).map((v) => v + 0.05 * gaussian(rng));
  return [
    { note: 'clean left band', intensities: round4(tinyClassSpectrum(0)) },
    { note: 'clean right band', intensities: round4(tinyClassSpectrum(1)) },
    { note: 'clean baseline', intensities: round4(tinyClassSpectrum(2)) },
    { note: 'noisy left band', intensities: round4(noisyLeft) },
    { note: 'noisy right band', intensities: round4(noisyRight) },
    { note: 'repeat of the clean left band', intensities: round4(tinyClassSpectrum(0)) },
    { note: 'ramp', intensities: round4(Array.from({ length: 101 }, (_, i) => i / 100)) },
    { note: 'all zeros', intensities: new Array(101).fill(0) },
  ];
}

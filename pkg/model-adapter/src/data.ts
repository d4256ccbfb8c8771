import { readFileSync } from 'node:fs';
import { join } from 'node:path';
import { z } from 'zod';
import { DataError } from './errors.js';

export const N_CLASSES = 3;

export interface Axis {
  start: number;
  end: number;
  n_bins: number;
}

const axisSchema = z.object({
  start: z.number(),
  end: z.number(),
  n_bins: z.number().int().min(8),
});

const manifestSchema = z.object({
  dataset: z.string(),
  axis: axisSchema,
});

const lineSchema = z.object({
  id: z.string(),
  label: z.number().int().min(0).max(N_CLASSES - 1),
  intensities: z.array(z.number()),
  ground_truth: z.array(z.tuple([z.number(), z.number()])).nullable(),
});

export interface Manifest {
  dataset: string;
  axis: Axis;
}

export interface SpectrumRecord {
  id: string;
  label: number;
  intensities: Float32Array;
  groundTruth: Array<[number, number]> | null;
}

export function readManifest(dataDir: string): Manifest {
  const path = join(dataDir, 'manifest.json');
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, 'utf8'));
  } catch (e) {
    throw new DataError(`cannot read ${path}: ${(e as Error).message}`);
  }
  const parsed = manifestSchema.safeParse(raw);
  if (!parsed.success) {
    throw new DataError(`${path} is not a dataset manifest: ${parsed.error.message}`);
  }
  return { dataset: parsed.data.dataset, axis: parsed.data.axis };
}

export function readSplit(path: string, axis: Axis): SpectrumRecord[] {
  let text: string;
  try {
    text = readFileSync(path, 'utf8');
  } catch (e) {
    throw new DataError(`cannot read ${path}: ${(e as Error).message}`);
  }
  const records: SpectrumRecord[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    if (!lines[i].trim()) continue;
    let raw: unknown;
    try {
      raw = JSON.parse(lines[i]);
    } catch {
      throw new DataError(`${path} line ${i + 1}: not valid JSON`);
    }
    const parsed = lineSchema.safeParse(raw);
    if (!parsed.success) {
      throw new DataError(`${path} line ${i + 1}: ${parsed.error.message}`);
    }
    const rec = parsed.data;
    if (rec.intensities.length !== axis.n_bins) {
      throw new DataError(
        `${path} line ${i + 1}: ${rec.intensities.length} intensities, axis has ${axis.n_bins} bins`);
    }
    if (!rec.intensities.every(Number.isFinite)) {
      throw new DataError(`${path} line ${i + 1}: non-finite intensity`);
    }
    records.push({
      id: rec.id,
      label: rec.label,
      intensities: Float32Array.from(rec.intensities),
      groundTruth: rec.ground_truth,
    });
  }
  return records;
}

/** Per-spectrum z-score. Stateless, so serving needs no saved statistics. */
export function standardize(values: ArrayLike<number>): Float32Array {
  const n = values.length;
  let sum = 0;
  for (let i = 0; i < n; i++) sum += values[i];
  const mean = sum / n;
  let ss = 0;
  for (let i = 0; i < n; i++) {
    const d = values[i] - mean;
    ss += d * d;
  }
  const sd = Math.sqrt(ss / n) || 1;
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) out[i] = (values[i] - mean) / sd;
  return out;
}

export function axesEqual(a: Axis, b: Axis): boolean {
  return a.start === b.start && a.end === b.end && a.n_bins === b.n_bins;
}

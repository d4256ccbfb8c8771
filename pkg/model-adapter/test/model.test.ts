import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { beforeAll, describe, expect, it } from 'vitest';
import { initBackend } from '../src/backend.js';
import { DataError } from '../src/errors.js';
import { TINY_AXIS } from '../src/fixture-data.js';
import { argmax, buildModel, loadModel, predictOne, saveModel } from '../src/model.js';

const N_BINS = TINY_AXIS.n_bins;
const ramp = Array.from({ length: N_BINS }, (_, i) => i / N_BINS);

beforeAll(async () => {
  await initBackend(false);
});

describe('buildModel', () => {
  it('stacks four conv blocks, three recurrent layers, and two dense layers', () => {
    const model = buildModel(N_BINS, 0);
    const kinds = model.layers.map((l) => l.getClassName());
    expect(kinds).toEqual([
      'Conv1D', 'Conv1D', 'Conv1D', 'Conv1D',
      'LSTM', 'LSTM', 'LSTM',
      'Dense', 'Dense',
    ]);
    expect(model.outputs[0].shape).toEqual([null, 3]);
    model.dispose();
  });

  it('produces a probability vector', () => {
    const model = buildModel(N_BINS, 1);
    const probs = predictOne(model, ramp);
    expect(probs).toHaveLength(3);
    for (const p of probs) {
      expect(Number.isFinite(p)).toBe(true);
      expect(p).toBeGreaterThanOrEqual(0);
      expect(p).toBeLessThanOrEqual(1);
    }
    const sum = probs.reduce((a, b) => a + b, 0);
    expect(Math.abs(sum - 1)).toBeLessThan(1e-6);
    model.dispose();
  });

  it('builds identical weights for the same seed', () => {
    const a = buildModel(N_BINS, 7);
    const b = buildModel(N_BINS, 7);
    const wa = a.getWeights().map((t) => Array.from(t.dataSync()));
    const wb = b.getWeights().map((t) => Array.from(t.dataSync()));
    expect(wa).toEqual(wb);
    a.dispose();
    b.dispose();
  });

  it('builds different weights for different seeds', () => {
    const a = buildModel(N_BINS, 7);
    const b = buildModel(N_BINS, 8);
    const wa = a.getWeights().flatMap((t) => Array.from(t.dataSync()));
    const wb = b.getWeights().flatMap((t) => Array.from(t.dataSync()));
    expect(wa).not.toEqual(wb);
    a.dispose();
    b.dispose();
  });
});

describe('saveModel / loadModel', () => {
  it('round-trips weights, predictions, and metadata', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'adapter-model-'));
    const path = join(dir, 'model.json');
    const model = buildModel(N_BINS, 3);
    const before = predictOne(model, ramp);
    await saveModel(model, path, { axis: TINY_AXIS, nClasses: 3, dataset: 'toy', seed: 3 });
    model.dispose();

    const loaded = await loadModel(path);
    expect(loaded.meta).toEqual({ axis: TINY_AXIS, nClasses: 3, dataset: 'toy', seed: 3 });
    const after = predictOne(loaded.model, ramp);
    expect(after).toHaveLength(before.length);
    for (let i = 0; i < before.length; i++) {
      expect(Math.abs(after[i] - before[i])).toBeLessThan(1e-9);
    }
    loaded.model.dispose();
  });

  it('writes a self-describing single file', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'adapter-model-'));
    const path = join(dir, 'model.json');
    const model = buildModel(N_BINS, 3);
    await saveModel(model, path, { axis: TINY_AXIS, nClasses: 3, dataset: 'toy', seed: 3 });
    model.dispose();
    const raw = JSON.parse(readFileSync(path, 'utf8'));
    expect(raw.format).toBe('conv-lstm-spectrum/1');
    expect(raw.axis).toEqual(TINY_AXIS);
    expect(raw.n_classes).toBe(3);
    expect(raw.preprocessing).toBe('zscore-per-spectrum');
    expect(typeof raw.model.weightsB64).toBe('string');
    expect(Array.isArray(raw.model.weightSpecs)).toBe(true);
  });

  it('rejects a file with the wrong format marker', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'adapter-model-'));
    const path = join(dir, 'other.json');
    writeFileSync(path, JSON.stringify({ format: 'something-else/9' }));
    await expect(loadModel(path)).rejects.toThrow(DataError);
  });

  it('rejects an unreadable file', async () => {
    await expect(loadModel('/does/not/exist.json')).rejects.toThrow(DataError);
  });
});

describe('argmax', () => {
  it('returns the index of the largest entry', () => {
    expect(argmax([0.2, 0.5, 0.3])).toBe(1);
    expect(argmax([0.9, 0.05, 0.05])).toBe(0);
  });

  it('breaks ties toward the first maximum', () => {
    expect(argmax([0.4, 0.4, 0.2])).toBe(0);
    expect(argmax([0.1, 0.45, 0.45])).toBe(1);
  });
});

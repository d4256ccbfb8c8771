import { writeFileSync } from 'node:fs';
import { join } from 'node:path';
import * as tf from '@tensorflow/tfjs';
import { initBackend } from './backend.js';
import { N_CLASSES, readManifest, readSplit, standardize, SpectrumRecord } from './data.js';
import { DataError } from './errors.js';
import { buildModel, saveModel } from './model.js';
import { makeRng, shuffledIndices } from './rng.js';

export interface TrainConfig {
  dataDir: string;
  outPath: string;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  metricsPath?: string;
}

export interface TrainMetrics {
  dataset: string;
  n_train: number;
  n_held_out: number;
  epochs: number;
  batch_size: number;
  learning_rate: number;
  seed: number;
  held_out_accuracy: number;
  per_class_accuracy: number[];
  train_seconds: number;
}

function validate(cfg: TrainConfig): void {
  if (!Number.isInteger(cfg.epochs) || cfg.epochs < 1) {
    throw new DataError('epochs must be a positive integer');
  }
  if (!Number.isInteger(cfg.batchSize) || cfg.batchSize < 1) {
    throw new DataError('batch size must be a positive integer');
  }
  if (!(cfg.learningRate > 0)) {
    throw new DataError('learning rate must be positive');
  }
}

function toTensors(records: SpectrumRecord[], nBins: number) {
  const n = records.length;
  const flat = new Float32Array(n * nBins);
  const labels = new Float32Array(n * N_CLASSES);
  for (let i = 0; i < n; i++) {
    flat.set(standardize(records[i].intensities), i * nBins);
    labels[i * N_CLASSES + records[i].label] = 1;
  }
  return {
    x: tf.tensor3d(flat, [n, nBins, 1]),
    y: tf.tensor2d(labels, [n, N_CLASSES]),
  };
}

export function evaluateAccuracy(model: tf.LayersModel, records: SpectrumRecord[], nBins: number) {
  const { x, y } = toTensors(records, nBins);
  y.dispose();
  const probs = model.predict(x, { batchSize: 64 }) as tf.Tensor;
  const predicted = probs.argMax(-1).dataSync();
  x.dispose();
  probs.dispose();
  const perClassHit = new Array(N_CLASSES).fill(0);
  const perClassTotal = new Array(N_CLASSES).fill(0);
  let hits = 0;
  for (let i = 0; i < records.length; i++) {
    perClassTotal[records[i].label]++;
    if (predicted[i] === records[i].label) {
      hits++;
      perClassHit[records[i].label]++;
    }
  }
  return {
    overall: hits / records.length,
    perClass: perClassHit.map((h, c) => (perClassTotal[c] ? h / perClassTotal[c] : 0)),
  };
}

export interface FitOptions {
  nBins: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
}

/** Fit a fresh classifier on in-memory records. The caller picks the
 * backend; the plain JS backend is the only one that can train the convs. */
export async function fitOnRecords(
  records: SpectrumRecord[], opts: FitOptions): Promise<tf.LayersModel> {
  // One seeded shuffle up front; fit() then walks batches in this fixed
  // order, keeping the whole run reproducible for a given seed.
  const order = shuffledIndices(records.length, makeRng(opts.seed));
  const shuffled = order.map((i) => records[i]);
  const { x, y } = toTensors(shuffled, opts.nBins);

  const model = buildModel(opts.nBins, opts.seed);
  model.compile({
    optimizer: tf.train.adam(opts.learningRate),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  });
  await model.fit(x, y, {
    epochs: opts.epochs,
    batchSize: opts.batchSize,
    shuffle: false,
    verbose: 0,
    callbacks: {
      onEpochEnd: async (epoch, logs) => {
        const acc = logs?.acc ?? logs?.accuracy ?? NaN;
        console.error(
          `epoch ${epoch + 1}/${opts.epochs}: loss ${logs?.loss?.toFixed(4)}, ` +
          `train accuracy ${Number(acc).toFixed(3)}`);
      },
    },
  });
  x.dispose();
  y.dispose();
  return model;
}

export async function train(cfg: TrainConfig): Promise<TrainMetrics> {
  validate(cfg);
  console.error(`backend: ${await initBackend(false)}`);
  const manifest = readManifest(cfg.dataDir);
  const nBins = manifest.axis.n_bins;
  const trainRecords = readSplit(join(cfg.dataDir, 'train.jsonl'), manifest.axis);
  const heldOut = readSplit(join(cfg.dataDir, 'test.jsonl'), manifest.axis);
  if (trainRecords.length === 0 || heldOut.length === 0) {
    throw new DataError(`${cfg.dataDir} has an empty split`);
  }

  const t0 = Date.now();
  const model = await fitOnRecords(trainRecords, {
    nBins,
    epochs: cfg.epochs,
    batchSize: cfg.batchSize,
    learningRate: cfg.learningRate,
    seed: cfg.seed,
  });
  const trainSeconds = (Date.now() - t0) / 1000;

  const held = evaluateAccuracy(model, heldOut, nBins);
  const metrics: TrainMetrics = {
    dataset: manifest.dataset,
    n_train: trainRecords.length,
    n_held_out: heldOut.length,
    epochs: cfg.epochs,
    batch_size: cfg.batchSize,
    learning_rate: cfg.learningRate,
    seed: cfg.seed,
    held_out_accuracy: held.overall,
    per_class_accuracy: held.perClass,
    train_seconds: trainSeconds,
  };

  await saveModel(model, cfg.outPath, {
    axis: manifest.axis,
    nClasses: N_CLASSES,
    dataset: manifest.dataset,
    seed: cfg.seed,
  });
  const metricsPath = cfg.metricsPath ?? `${cfg.outPath}.metrics.json`;
  writeFileSync(metricsPath, JSON.stringify(metrics, null, 2) + '\n');
  console.error(
    `held-out accuracy ${held.overall.toFixed(3)} ` +
    `(per class: ${held.perClass.map((a) => a.toFixed(3)).join(', ')})`);
  return metrics;
}

import { readFileSync, writeFileSync } from 'node:fs';
import * as tf from '@tensorflow/tfjs';
import { Axis, N_CLASSES, standardize } from './data.js';
import { DataError } from './errors.js';
import { layerSeeds } from './rng.js';

export const MODEL_FORMAT = 'conv-lstm-spectrum/1';

export interface ModelMeta {
  axis: Axis;
  nClasses: number;
  dataset: string;
  seed: number;
}

export interface LoadedModel {
  model: tf.LayersModel;
  meta: ModelMeta;
}

/** Four strided conv blocks squeeze the spectrum to a short sequence, a
 * three-layer recurrent stack reads it, two dense layers decide.
 *
 * Every layer is named explicitly: the framework's fallback names come from
 * a process-global counter, which would leak process history into the saved
 * topology and break same-seed byte-for-byte reproducibility. */
export function buildModel(nBins: number, seed: number): tf.LayersModel {
  const s = layerSeeds(seed, 12);
  const glorot = (i: number) => tf.initializers.glorotUniform({ seed: s[i] });
  const ortho = (i: number) => tf.initializers.orthogonal({ gain: 1, seed: s[i] });

  const model = tf.sequential({ name: 'spectrum_classifier' });
  model.add(tf.layers.conv1d({
    inputShape: [nBins, 1], filters: 8, kernelSize: 9, strides: 4, padding: 'same',
    activation: 'relu', kernelInitializer: glorot(0), name: 'conv1',
  }));
  model.add(tf.layers.conv1d({
    filters: 16, kernelSize: 7, strides: 4, padding: 'same',
    activation: 'relu', kernelInitializer: glorot(1), name: 'conv2',
  }));
  model.add(tf.layers.conv1d({
    filters: 16, kernelSize: 5, strides: 2, padding: 'same',
    activation: 'relu', kernelInitializer: glorot(2), name: 'conv3',
  }));
  model.add(tf.layers.conv1d({
    filters: 32, kernelSize: 3, strides: 2, padding: 'same',
    activation: 'relu', kernelInitializer: glorot(3), name: 'conv4',
  }));
  model.add(tf.layers.lstm({
    units: 16, returnSequences: true,
    kernelInitializer: glorot(4), recurrentInitializer: ortho(5), name: 'lstm1',
  }));
  model.add(tf.layers.lstm({
    units: 16, returnSequences: true,
    kernelInitializer: glorot(6), recurrentInitializer: ortho(7), name: 'lstm2',
  }));
  model.add(tf.layers.lstm({
    units: 16,
    kernelInitializer: glorot(8), recurrentInitializer: ortho(9), name: 'lstm3',
  }));
  model.add(tf.layers.dense({
    units: 16, activation: 'relu', kernelInitializer: glorot(10), name: 'dense1',
  }));
  model.add(tf.layers.dense({
    units: N_CLASSES, activation: 'softmax', kernelInitializer: glorot(11), name: 'dense2',
  }));
  return model;
}

export async function saveModel(
  model: tf.LayersModel, path: string, meta: ModelMeta): Promise<void> {
  let file: object | undefined;
  await model.save(tf.io.withSaveHandler(async (artifacts) => {
    const weightData = artifacts.weightData as ArrayBuffer;
    file = {
      format: MODEL_FORMAT,
      axis: meta.axis,
      n_classes: meta.nClasses,
      dataset: meta.dataset,
      seed: meta.seed,
      preprocessing: 'zscore-per-spectrum',
      model: {
        topology: artifacts.modelTopology,
        weightSpecs: artifacts.weightSpecs,
        weightsB64: Buffer.from(weightData).toString('base64'),
      },
    };
    return { modelArtifactsInfo: { dateSaved: new Date(0), modelTopologyType: 'JSON' } };
  }));
  writeFileSync(path, JSON.stringify(file) + '\n');
}

export async function loadModel(path: string): Promise<LoadedModel> {
  let raw: any;
  try {
    raw = JSON.parse(readFileSync(path, 'utf8'));
  } catch (e) {
    throw new DataError(`cannot read model ${path}: ${(e as Error).message}`);
  }
  if (raw?.format !== MODEL_FORMAT) {
    throw new DataError(`${path} is not a ${MODEL_FORMAT} model file`);
  }
  const buf = Buffer.from(raw.model.weightsB64, 'base64');
  const weightData = buf.buffer.slice(buf.byteOffset, buf.byteOffset + buf.byteLength);
  const model = await tf.loadLayersModel(tf.io.fromMemory({
    modelTopology: raw.model.topology,
    weightSpecs: raw.model.weightSpecs,
    weightData,
  }));
  return {
    model,
    meta: {
      axis: raw.axis,
      nClasses: raw.n_classes,
      dataset: raw.dataset,
      seed: raw.seed,
    },
  };
}

/** Class probabilities for one raw (unstandardized) spectrum. */
export function predictOne(model: tf.LayersModel, intensities: ArrayLike<number>): number[] {
  const std = standardize(intensities);
  return tf.tidy(() => {
    const x = tf.tensor3d(std, [1, std.length, 1]);
    const probs = model.predict(x) as tf.Tensor;
    return Array.from(probs.dataSync());
  });
}

export function argmax(probs: number[]): number {
  let best = 0;
  for (let i = 1; i < probs.length; i++) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

import { mkdirSync, writeFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { initBackend } from './backend.js';
import { probeSpectra, TINY_AXIS, TINY_SEED, tinyRecords } from './fixture-data.js';
import { saveModel } from './model.js';
import { LineClient } from './stdio-client.js';
import { evaluateAccuracy, fitOnRecords } from './train.js';

/** Regenerate the committed test fixtures: a tiny model trained on the toy
 * band problem, plus a transcript of one real serve session against it.
 * Run with: npm run make-fixtures */

const packageRoot = join(dirname(fileURLToPath(import.meta.url)), '..');
const fixturesDir = join(packageRoot, 'test', 'fixtures');

async function main(): Promise<void> {
  console.error(`backend: ${await initBackend(false)}`);
  const trainSet = tinyRecords(40, 0.05, 11);
  const checkSet = tinyRecords(10, 0.05, 12);
  const model = await fitOnRecords(trainSet, {
    nBins: TINY_AXIS.n_bins,
    epochs: 30,
    batchSize: 16,
    learningRate: 0.01,
    seed: TINY_SEED,
  });
  const check = evaluateAccuracy(model, checkSet, TINY_AXIS.n_bins);
  console.error(`fixture model check accuracy: ${check.overall.toFixed(3)}`);
  if (check.overall < 1) {
    throw new Error('the fixture model must classify the toy data perfectly');
  }

  mkdirSync(fixturesDir, { recursive: true });
  const modelPath = join(fixturesDir, 'tiny-model.json');
  await saveModel(model, modelPath, {
    axis: TINY_AXIS,
    nClasses: 3,
    dataset: 'tiny-bands',
    seed: TINY_SEED,
  });
  model.dispose();

  // Record one real session: spawn serve, walk the probe set, keep every
  // line from both directions.
  const client = new LineClient('node', [
    join(packageRoot, 'dist', 'cli.js'), 'serve', '--model', modelPath,
  ]);
  const hello = JSON.parse(await client.next());
  client.send(JSON.stringify({ type: 'ready', n_classes: hello.n_classes }));
  const probes = probeSpectra();
  for (let id = 0; id < probes.length; id++) {
    client.send(JSON.stringify({ type: 'classify', id, intensities: probes[id].intensities }));
    const reply = JSON.parse(await client.next());
    console.error(`${probes[id].note}: label ${reply.label}`);
    if (id < 3 && reply.label !== id) {
      throw new Error(`probe "${probes[id].note}" should get label ${id}, got ${reply.label}`);
    }
  }
  client.endInput();
  const code = await client.waitExit();
  if (code !== 0) {
    throw new Error(`serve exited with code ${code}`);
  }
  const transcriptPath = join(fixturesDir, 'transcript.jsonl');
  writeFileSync(
    transcriptPath,
    client.record.map((entry) => JSON.stringify(entry)).join('\n') + '\n');
  console.error(`wrote ${modelPath}`);
  console.error(`wrote ${transcriptPath} (${client.record.length} lines)`);
}

main().catch((e) => {
  console.error(e instanceof Error ? e.message : e);
  process.exit(1);
});

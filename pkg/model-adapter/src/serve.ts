import { createInterface } from 'node:readline';
import { z } from 'zod';
import { initBackend } from './backend.js';
import { argmax, loadModel, predictOne } from './model.js';

const readySchema = z.object({
  type: z.literal('ready'),
  n_classes: z.number().int(),
});

const classifySchema = z.object({
  type: z.literal('classify'),
  id: z.number().int().min(0),
  intensities: z.array(z.number()),
});

function send(msg: object): void {
  process.stdout.write(JSON.stringify(msg) + '\n');
}

function die(reason: string): never {
  process.stderr.write(`protocol error: ${reason}\n`);
  process.exit(1);
}

/** One request at a time, answers in arrival order, no state between
 * requests. stdout carries protocol lines only. */
export async function serve(modelPath: string): Promise<void> {
  await initBackend(true);
  const { model, meta } = await loadModel(modelPath);
  // Warm-up: graph construction happens now, not inside the first request.
  predictOne(model, new Float32Array(meta.axis.n_bins));

  send({ type: 'hello', axis: meta.axis, n_classes: meta.nClasses });

  const rl = createInterface({ input: process.stdin });
  let sawReady = false;
  for await (const line of rl) {
    if (!line.trim()) continue;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch {
      die(`not valid JSON: ${line.slice(0, 120)}`);
    }
    if (!sawReady) {
      const ready = readySchema.safeParse(raw);
      if (!ready.success) {
        die('first message must be {"type": "ready", ...}');
      }
      if (ready.data.n_classes !== meta.nClasses) {
        die(`peer wants ${ready.data.n_classes} classes, model has ${meta.nClasses}`);
      }
      sawReady = true;
      continue;
    }
    const req = classifySchema.safeParse(raw);
    if (!req.success) {
      die('expected a classify request');
    }
    const v = req.data.intensities;
    if (v.length !== meta.axis.n_bins) {
      die(`request ${req.data.id} has ${v.length} intensities, axis has ${meta.axis.n_bins} bins`);
    }
    if (!v.every(Number.isFinite)) {
      die(`request ${req.data.id} has non-finite intensities`);
    }
    const probs = predictOne(model, v);
    send({
      type: 'prediction',
      id: req.data.id,
      label: argmax(probs),
      probabilities: probs,
    });
  }
  model.dispose();
}

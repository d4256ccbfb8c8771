import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { expect } from 'vitest';
import { LineClient, type Exchange } from '../src/stdio-client.js';

export const packageRoot = join(dirname(fileURLToPath(import.meta.url)), '..');
export const cliPath = join(packageRoot, 'dist', 'cli.js');
export const fixturesDir = join(packageRoot, 'test', 'fixtures');
export const fixtureModelPath = join(fixturesDir, 'tiny-model.json');
export const transcriptPath = join(fixturesDir, 'transcript.jsonl');

export function startServe(modelPath: string = fixtureModelPath): LineClient {
  return new LineClient('node', [cliPath, 'serve', '--model', modelPath]);
}

export async function handshake(client: LineClient): Promise<{ axis: object; n_classes: number }> {
  const hello = JSON.parse(await client.next());
  expect(hello.type).toBe('hello');
  client.send(JSON.stringify({ type: 'ready', n_classes: hello.n_classes }));
  return hello;
}

export function readTranscript(): Exchange[] {
  return readFileSync(transcriptPath, 'utf8')
    .split('\n')
    .filter((l) => l.trim())
    .map((l) => JSON.parse(l));
}

/** Feed the recorded client lines to a fresh server and check that its
 * answers match the recording: labels and ids exactly, probabilities to
 * within a small numeric tolerance, the hello line field for field. */
export async function replayTranscript(probTolerance = 1e-4): Promise<number> {
  const transcript = readTranscript();
  expect(transcript.length).toBeGreaterThan(2);
  const client = startServe();
  let compared = 0;
  for (const entry of transcript) {
    if (entry.dir === 'in') {
      client.send(entry.line);
      continue;
    }
    const actualLine = await client.next();
    const expected = JSON.parse(entry.line);
    const actual = JSON.parse(actualLine);
    expect(actual.type).toBe(expected.type);
    if (expected.type === 'hello') {
      expect(actual.axis).toEqual(expected.axis);
      expect(actual.n_classes).toBe(expected.n_classes);
    } else {
      expect(actual.id).toBe(expected.id);
      expect(actual.label).toBe(expected.label);
      expect(actual.probabilities).toHaveLength(expected.probabilities.length);
      for (let i = 0; i < expected.probabilities.length; i++) {
        expect(Math.abs(actual.probabilities[i] - expected.probabilities[i]))
          .toBeLessThanOrEqual(probTolerance);
      }
    }
    compared++;
  }
  client.endInput();
  expect(await client.waitExit()).toBe(0);
  return compared;
}

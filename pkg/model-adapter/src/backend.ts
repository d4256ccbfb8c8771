import { createRequire } from 'node:module';
import { dirname, join } from 'node:path';
import * as tf from '@tensorflow/tfjs';
import { setThreadsCount, setWasmPaths } from '@tensorflow/tfjs-backend-wasm';

/** Pick the compute backend.
 *
 * Training must use the plain JS backend: the wasm build ships no
 * convolution gradient kernels. Inference prefers wasm (noticeably faster,
 * single-threaded for reproducible numerics) and falls back to plain JS.
 */
export async function initBackend(preferWasm: boolean): Promise<string> {
  if (preferWasm) {
    try {
      const require = createRequire(import.meta.url);
      const pkg = require.resolve('@tensorflow/tfjs-backend-wasm');
      setWasmPaths(join(dirname(pkg), '/'));
      setThreadsCount(1);
      if (await tf.setBackend('wasm')) {
        await tf.ready();
        return tf.getBackend();
      }
    } catch {
      // fall through to the JS backend
    }
    process.stderr.write('wasm backend unavailable, using plain js backend\n');
  }
  await tf.setBackend('cpu');
  await tf.ready();
  return tf.getBackend();
}

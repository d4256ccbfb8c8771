import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    testTimeout: 120_000,
    hookTimeout: 300_000,
    // Model training dominates the acceptance suite; run files one at a
    // time so their timings stay honest on a small machine.
    fileParallelism: false,
  },
});

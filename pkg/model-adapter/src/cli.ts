import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

/** Route non-protocol chatter (the framework greets on import) to stderr.
 * Protocol output is written straight to stdout, never through console. */
function consoleToStderr(): void {
  console.log = (...a: unknown[]) => console.error(...a);
  console.info = (...a: unknown[]) => console.error(...a);
  console.warn = (...a: unknown[]) => console.error(...a);
}

async function main(): Promise<void> {
  await yargs(hideBin(process.argv))
    .scriptName('model-adapter')
    .command(
      'train',
      'fit the classifier on a simulated dataset directory',
      (y) => y
        .option('data', { type: 'string', demandOption: true, describe: 'dataset dir with manifest.json and train/test JSONL' })
        .option('out', { type: 'string', demandOption: true, describe: 'model output path' })
        .option('epochs', { type: 'number', default: 6 })
        .option('batch-size', { type: 'number', default: 64 })
        .option('learning-rate', { type: 'number', default: 2e-3 })
        .option('seed', { type: 'number', default: 0 })
        .option('metrics', { type: 'string', describe: 'metrics JSON path (default: OUT.metrics.json)' }),
      async (args) => {
        consoleToStderr();
        const { train } = await import('./train.js');
        await train({
          dataDir: args.data,
          outPath: args.out,
          epochs: args.epochs,
          batchSize: args['batch-size'],
          learningRate: args['learning-rate'],
          seed: args.seed,
          metricsPath: args.metrics,
        });
      })
    .command(
      'serve',
      'answer classify requests over stdin/stdout',
      (y) => y
        .option('model', { type: 'string', demandOption: true, describe: 'model file written by train' }),
      async (args) => {
        consoleToStderr();
        const { serve } = await import('./serve.js');
        await serve(args.model);
      })
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      if (err) throw err;
      process.stderr.write(`error: ${msg}\n`);
      process.exit(1);
    })
    .parseAsync();
}

main().catch((e) => {
  process.stderr.write(`error: ${e instanceof Error ? e.message : String(e)}\n`);
  process.exit(2);
});

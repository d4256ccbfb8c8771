import { spawn, type ChildProcessWithoutNullStreams } from 'node:child_process';
import { createInterface } from 'node:readline';

export interface Exchange {
  dir: 'in' | 'out';
  line: string;
}

/** Line-oriented client for a child process speaking JSON lines on stdio.
 * Every line in either direction lands in `record`, ready to be replayed. */
export class LineClient {
  readonly record: Exchange[] = [];
  readonly stderrLines: string[] = [];
  private child: ChildProcessWithoutNullStreams;
  private pending: string[] = [];
  private waiters: Array<(line: string) => void> = [];
  private exitPromise: Promise<number | null>;

  constructor(command: string, args: string[]) {
    this.child = spawn(command, args, { stdio: ['pipe', 'pipe', 'pipe'] });
    const out = createInterface({ input: this.child.stdout });
    out.on('line', (line) => {
      this.record.push({ dir: 'out', line });
      const waiter = this.waiters.shift();
      if (waiter) waiter(line);
      else this.pending.push(line);
    });
    const err = createInterface({ input: this.child.stderr });
    err.on('line', (line) => this.stderrLines.push(line));
    this.exitPromise = new Promise((resolve) => {
      this.child.on('close', (code) => resolve(code));
    });
  }

  send(line: string): void {
    this.record.push({ dir: 'in', line });
    this.child.stdin.write(line + '\n');
  }

  /** Next stdout line, in arrival order. */
  async next(timeoutMs = 60_000): Promise<string> {
    const buffered = this.pending.shift();
    if (buffered !== undefined) return buffered;
    return await new Promise((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error('timed out waiting for a line from the child')),
        timeoutMs);
      this.waiters.push((line) => {
        clearTimeout(timer);
        resolve(line);
      });
    });
  }

  endInput(): void {
    this.child.stdin.end();
  }

  async waitExit(): Promise<number | null> {
    return await this.exitPromise;
  }
}

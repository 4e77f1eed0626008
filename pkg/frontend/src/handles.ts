/**
 * Opaque protocol handles. A handle owns a private scratch directory
 * holding whatever state the core persists between calls (the server key
 * file, the client blind/state file); destroy() deletes it. Handles are
 * single-threaded and must not be used after destroy().
 */

import { mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { runCore } from './core.js';

export class HandleDestroyedError extends Error {}

export interface SetupOptions {
  maxQueries: number;
  fpr: number;
  ds?: 'bloom' | 'gcs';
  pinReveal?: boolean;
  /** Inject a fixed server key (hex scalar). Tests and fixtures only. */
  testKeyHex?: string;
}

export type IntersectionResult = { indices: number[] } | { cardinality: number };

function joinElements(elements: string[]): Buffer {
  for (const e of elements) {
    if (e.includes('\n')) throw new Error('elements must not contain newlines');
  }
  return Buffer.from(elements.map((e) => e + '\n').join(''), 'utf-8');
}

abstract class Handle {
  protected readonly dir: string;
  private destroyed = false;

  constructor(prefix: string) {
    this.dir = mkdtempSync(join(tmpdir(), prefix));
  }

  protected path(name: string): string {
    this.check();
    return join(this.dir, name);
  }

  protected check(): void {
    if (this.destroyed) throw new HandleDestroyedError('handle already destroyed');
  }

  destroy(): void {
    if (!this.destroyed) {
      rmSync(this.dir, { recursive: true, force: true });
      this.destroyed = true;
    }
  }
}

export class ServerHandle extends Handle {
  private haveKey = false;

  constructor() {
    super('ecpsi-server-');
  }

  /** Offline phase; returns the encoded setup message. */
  setup(elements: string[], opts: SetupOptions): Uint8Array {
    const setFile = this.path('server-set.txt');
    writeFileSync(setFile, joinElements(elements));
    const args = [
      'setup',
      '--server-set', setFile,
      '--max-queries', String(opts.maxQueries),
      '--fpr', opts.fpr.toExponential(),
      '--ds', opts.ds ?? 'bloom',
      '--out', this.path('setup.bin'),
      '--key-out', this.path('key.json'),
    ];
    if (opts.pinReveal !== undefined) args.push('--pin-reveal', String(opts.pinReveal));
    if (opts.testKeyHex) {
      const seed = this.path('seed-key.json');
      writeFileSync(seed, JSON.stringify({
        format: 'ecpsi-key', version: 1, key: opts.testKeyHex,
        dataset_size: 0, max_queries: opts.maxQueries, fpr: opts.fpr,
        ds: opts.ds ?? 'bloom', pin_reveal: null,
      }));
      args.push('--key-in', seed);
    }
    runCore(args);
    this.haveKey = true;
    return new Uint8Array(readFileSync(this.path('setup.bin')));
  }

  /** Online phase: request message bytes in, response message bytes out. */
  processRequest(requestBytes: Uint8Array): Uint8Array {
    this.check();
    if (!this.haveKey) throw new Error('setup() has not been run on this handle');
    writeFileSync(this.path('request.bin'), requestBytes);
    runCore([
      'respond',
      '--key', this.path('key.json'),
      '--in', this.path('request.bin'),
      '--out', this.path('response.bin'),
    ]);
    return new Uint8Array(readFileSync(this.path('response.bin')));
  }
}

export class ClientHandle extends Handle {
  private haveState = false;

  constructor() {
    super('ecpsi-client-');
  }

  /** Blind the elements; returns the encoded request message. */
  createRequest(elements: string[], reveal: boolean, testBlindHex?: string): Uint8Array {
    const setFile = this.path('client-set.txt');
    writeFileSync(setFile, joinElements(elements));
    const args = [
      'request',
      '--client-set', setFile,
      '--out', this.path('request.bin'),
      '--state-out', this.path('state.json'),
    ];
    if (reveal) args.push('--reveal');
    if (testBlindHex) args.push('--blind-in', testBlindHex);
    runCore(args);
    this.haveState = true;
    return new Uint8Array(readFileSync(this.path('request.bin')));
  }

  /** Unblind a response against a setup message; consumes the state. */
  processResponse(setupBytes: Uint8Array, responseBytes: Uint8Array): IntersectionResult {
    this.check();
    if (!this.haveState) throw new Error('createRequest() has not been run on this handle');
    writeFileSync(this.path('setup.bin'), setupBytes);
    writeFileSync(this.path('response.bin'), responseBytes);
    const stdout = runCore([
      'finish',
      '--state', this.path('state.json'),
      '--setup', this.path('setup.bin'),
      '--response', this.path('response.bin'),
      '--json',
    ]);
    return JSON.parse(stdout.trim()) as IntersectionResult;
  }
}

/**
 * Subprocess bridge to the core CLI. Everything crossing this boundary is
 * bytes in files or scalar flags, mirroring a C-style flat interface; no
 * group math ever happens in this package.
 *
 * The core command defaults to `python3 -m ecpsi` and can be overridden
 * with the ECPSI_CORE environment variable (whitespace-separated argv).
 */

import { spawnSync } from 'node:child_process';

export class CoreError extends Error {
  constructor(
    message: string,
    public readonly exitCode: number,
  ) {
    super(message);
  }
}

function coreCommand(): string[] {
  const override = process.env.ECPSI_CORE;
  if (override && override.trim().length > 0) return override.trim().split(/\s+/);
  return ['python3', '-m', 'ecpsi'];
}

export function runCore(args: string[]): string {
  const [cmd, ...prefix] = coreCommand();
  const proc = spawnSync(cmd, [...prefix, ...args], {
    encoding: 'utf-8',
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw new CoreError(`failed to launch core: ${proc.error.message}`, -1);
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr ?? '').trim() || '(no diagnostic)';
    throw new CoreError(`core exited ${proc.status}: ${detail}`, proc.status ?? -1);
  }
  return proc.stdout ?? '';
}

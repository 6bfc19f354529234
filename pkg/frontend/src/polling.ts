import type { ApiClient } from "./api.js";
import type { ClassifyResult } from "./types.js";

export const POLL_INTERVAL_MS = 500;
export const POLL_TIMEOUT_MS = 10_000;

export class PollTimeoutError extends Error {
  constructor(public readonly key: string) {
    super(`classification ${key} still pending after ${POLL_TIMEOUT_MS / 1000}s`);
  }
}

function delay(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(resolve, ms);
    signal?.addEventListener(
      "abort",
      () => {
        clearTimeout(timer);
        reject(new DOMException("aborted", "AbortError"));
      },
      { once: true },
    );
  });
}

/**
 * Poll the result endpoint every POLL_INTERVAL_MS until the job leaves
 * the pending state, failing with PollTimeoutError after POLL_TIMEOUT_MS.
 * An aborted signal cancels the loop (stale submissions are dropped this
 * way when the user re-submits).
 */
export async function pollResult(
  client: ApiClient,
  key: string,
  language: string,
  opts: { intervalMs?: number; timeoutMs?: number; signal?: AbortSignal } = {},
): Promise<ClassifyResult> {
  const intervalMs = opts.intervalMs ?? POLL_INTERVAL_MS;
  const timeoutMs = opts.timeoutMs ?? POLL_TIMEOUT_MS;
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const result = await client.getResult(key, language, opts.signal);
    if (result.status !== "pending") {
      return result;
    }
    if (Date.now() + intervalMs > deadline) {
      throw new PollTimeoutError(key);
    }
    await delay(intervalMs, opts.signal);
  }
}

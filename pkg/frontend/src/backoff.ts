// Reconnect pacing: exponential, capped, deterministic.

export const BACKOFF_BASE_MS = 500;
export const BACKOFF_CAP_MS = 10_000;

export function backoffDelay(attempt: number): number {
  if (attempt <= 0) return BACKOFF_BASE_MS;
  const delay = BACKOFF_BASE_MS * 2 ** attempt;
  return Math.min(delay, BACKOFF_CAP_MS);
}

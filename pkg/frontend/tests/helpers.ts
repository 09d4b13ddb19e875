import type { FetchLike } from '../src/api';
import type { Distances, EmbeddingPoint, Partition } from '../src/types';

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/** Route-table fetch stub that records every call it serves. */
export function fakeFetch(
  routes: Record<string, (call: RecordedCall) => Response>,
): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const call: RecordedCall = {
      url,
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(init.body as string) : null,
    };
    calls.push(call);
    const key = `${call.method} ${url}`;
    const route = routes[key];
    if (!route) {
      return jsonResponse({ detail: `no route for ${key}` }, 404);
    }
    return route(call);
  };
  return { fetchFn, calls };
}

export function point(
  id: string,
  origin: EmbeddingPoint['origin'],
  x = 0,
  y = 0,
  category = 'crack',
): EmbeddingPoint {
  return { id, x, y, origin, category };
}

export function partition(
  kept: string[],
  removed: string[],
  threshold: number | null = 5,
  revision = 0,
): Partition {
  return { kept, removed, threshold, per_category: true, revision };
}

export function distances(values: Record<string, number>): Distances {
  const nums = Object.values(values);
  const hi = Math.max(...nums, 1);
  return {
    edges: [0, hi / 2, hi],
    counts: [
      nums.filter((v) => v <= hi / 2).length,
      nums.filter((v) => v > hi / 2).length,
    ],
    distances: values,
    threshold: 5,
  };
}

import type { Distances } from './types';

export interface HistogramBar {
  x: number;
  width: number;
  height: number;
  count: number;
}

export interface HistogramLayout {
  bars: HistogramBar[];
  /** Pixel x of the threshold marker, or null when the threshold is unset
   * or beyond the histogram range. */
  markerX: number | null;
}

/**
 * Lay out the nearest-real distance histogram with the active threshold
 * marked, so the reviewer can calibrate the cut against the distribution.
 */
export function layoutHistogram(
  data: Distances,
  width: number,
  height: number,
  threshold: number | null = data.threshold,
): HistogramLayout {
  const { edges, counts } = data;
  const maxCount = Math.max(...counts, 1);
  const lo = edges[0];
  const hi = edges[edges.length - 1];
  const span = hi - lo || 1;
  const bars = counts.map((count, i) => ({
    x: ((edges[i] - lo) / span) * width,
    width: ((edges[i + 1] - edges[i]) / span) * width,
    height: (count / maxCount) * height,
    count,
  }));
  let markerX: number | null = null;
  if (threshold !== null && threshold >= lo && threshold <= hi) {
    markerX = ((threshold - lo) / span) * width;
  }
  return { bars, markerX };
}

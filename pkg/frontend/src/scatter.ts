import { pointKind, PointKind } from './state';
import type { EmbeddingPoint, Partition } from './types';

export interface PlacedPoint {
  id: string;
  px: number;
  py: number;
  kind: PointKind;
}

export const POINT_RADIUS = 4;

export const KIND_STYLE: Record<PointKind, { fill: string; stroke: string }> = {
  real: { fill: '#4a6fa5', stroke: '#2c4a75' },
  kept: { fill: '#54a24b', stroke: '#2f7d28' },
  removed: { fill: '#d4d4d4', stroke: '#b04238' },
};

/**
 * Map embedding coordinates into pixel space with a uniform scale and a
 * fixed margin, preserving aspect ratio.
 */
export function layoutPoints(
  points: EmbeddingPoint[],
  partition: Partition,
  width: number,
  height: number,
  margin = 16,
): PlacedPoint[] {
  if (points.length === 0) return [];
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  const offX = (width - spanX * scale) / 2;
  const offY = (height - spanY * scale) / 2;
  return points.map((p) => ({
    id: p.id,
    px: offX + (p.x - minX) * scale,
    py: offY + (p.y - minY) * scale,
    kind: pointKind(p, partition),
  }));
}

/** Topmost point within the hit radius of (px, py), or null. */
export function hitTest(
  placed: PlacedPoint[],
  px: number,
  py: number,
  radius = POINT_RADIUS + 2,
): PlacedPoint | null {
  for (let i = placed.length - 1; i >= 0; i--) {
    const p = placed[i];
    const dx = p.px - px;
    const dy = p.py - py;
    if (dx * dx + dy * dy <= radius * radius) return p;
  }
  return null;
}

export function drawScatter(
  ctx: CanvasRenderingContext2D,
  placed: PlacedPoint[],
  selected: Set<string>,
): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (const p of placed) {
    const style = KIND_STYLE[p.kind];
    ctx.beginPath();
    ctx.arc(p.px, p.py, POINT_RADIUS, 0, 2 * Math.PI);
    ctx.fillStyle = style.fill;
    ctx.strokeStyle = selected.has(p.id) ? '#111' : style.stroke;
    ctx.lineWidth = selected.has(p.id) ? 2 : 1;
    ctx.fill();
    ctx.stroke();
  }
}

import { pointKind } from './state';
import type { EmbeddingPoint, Partition } from './types';

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Thumbnail grid of generated composites, styled by partition membership. */
export function renderGrid(
  points: EmbeddingPoint[],
  partition: Partition,
  thumbUrl: (id: string) => string,
): string {
  const generated = points.filter((p) => p.origin === 'generated');
  if (generated.length === 0) {
    return '<p class="empty">No generated images in this session.</p>';
  }
  const cards = generated.map((p) => {
    const kind = pointKind(p, partition);
    const id = escapeHtml(p.id);
    return (
      `<figure class="card ${kind}" data-id="${id}">` +
      `<img src="${thumbUrl(p.id)}" alt="${id}" loading="lazy">` +
      `<figcaption>${id}<span class="badge">${kind}</span></figcaption>` +
      `<div class="verdicts">` +
      `<button data-verdict="accept" data-id="${id}">accept</button>` +
      `<button data-verdict="reject" data-id="${id}">reject</button>` +
      `<button data-verdict="undecided" data-id="${id}">reset</button>` +
      `</div></figure>`
    );
  });
  return `<div class="grid">${cards.join('')}</div>`;
}

/** Full-size detail pane for one embedded image. */
export function renderDetail(
  point: EmbeddingPoint,
  partition: Partition,
  imageUrl: (id: string) => string,
): string {
  const kind = pointKind(point, partition);
  const id = escapeHtml(point.id);
  return (
    `<div class="detail">` +
    `<img src="${imageUrl(point.id)}" alt="${id}">` +
    `<dl><dt>id</dt><dd>${id}</dd>` +
    `<dt>category</dt><dd>${escapeHtml(point.category)}</dd>` +
    `<dt>origin</dt><dd>${point.origin}</dd>` +
    `<dt>status</dt><dd>${kind}</dd></dl></div>`
  );
}

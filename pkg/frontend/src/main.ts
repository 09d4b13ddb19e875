import { GalleryApi } from './api';
import { ReviewController } from './app';
import { renderDetail, renderGrid } from './grid';
import { layoutHistogram } from './histogram';
import { drawScatter, hitTest, layoutPoints, PlacedPoint } from './scatter';
import { persistedState, visiblePoints } from './state';
import type { Verdict } from './types';

const STORAGE_KEY = 'defectaug-view';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function main(): void {
  const api = new GalleryApi();
  const scatterCanvas = byId<HTMLCanvasElement>('scatter');
  const histCanvas = byId<HTMLCanvasElement>('histogram');
  const gridPane = byId<HTMLDivElement>('grid-pane');
  const detailPane = byId<HTMLDivElement>('detail-pane');
  const slider = byId<HTMLInputElement>('threshold');
  const sliderValue = byId<HTMLSpanElement>('threshold-value');
  const categorySelect = byId<HTMLSelectElement>('category');
  const banner = byId<HTMLDivElement>('banner');
  const exportButton = byId<HTMLButtonElement>('export');
  const exportStatus = byId<HTMLSpanElement>('export-status');

  let placed: PlacedPoint[] = [];

  const showError = (message: string): void => {
    banner.textContent = message;
    banner.hidden = false;
            window.setTimeout(() => { banner.hidden = true; }, 6000);
  };

  const render = (c: ReviewController): void => {
    if (!c.data) return;
    const { points, partition, distances } = c.data;
    const shown = visiblePoints(points, c.state);

    placed = layoutPoints(shown, partition, scatterCanvas.width, scatterCanvas.height);
    const ctx = scatterCanvas.getContext('2d');
    if (ctx) drawScatter(ctx, placed, new Set(c.state.selected));

    const hctx = histCanvas.getContext('2d');
    if (hctx) {
      const layout = layoutHistogram(distances, histCanvas.width, histCanvas.height);
      hctx.clearRect(0, 0, histCanvas.width, histCanvas.height);
      hctx.fillStyle = '#9ecae1';
      for (const bar of layout.bars) {
        hctx.fillRect(bar.x, histCanvas.height - bar.height, Math.max(bar.width - 1, 1), bar.height);
      }
      if (layout.markerX !== null) {
        hctx.strokeStyle = '#b04238';
        hctx.beginPath();
        hctx.moveTo(layout.markerX, 0);
        hctx.lineTo(layout.markerX, histCanvas.height);
        hctx.stroke();
      }
    }

    gridPane.innerHTML = renderGrid(shown, partition, (id) => api.thumbUrl(id));
    const selectedId = c.state.selected[c.state.selected.length - 1];
    const selectedPoint = points.find((p) => p.id === selectedId);
    detailPane.innerHTML = selectedPoint
      ? renderDetail(selectedPoint, partition, (id) => api.imageUrl(id))
      : '<p class="empty">Click a point or thumbnail to inspect it.</p>';

    const categories = [...new Set(points.map((p) => p.category))].sort();
    if (categorySelect.options.length !== categories.length + 1) {
      categorySelect.innerHTML =
        '<option value="">all categories</option>' +
        categories.map((cat) => `<option value="${cat}">${cat}</option>`).join('');
      categorySelect.value = c.state.categoryFilter ?? '';
    }

    sliderValue.textContent = c.state.threshold.toFixed(2);
    localStorage.setItem(STORAGE_KEY, JSON.stringify(persistedState(c.state)));
  };

  const controller = new ReviewController(api, render, showError);

  const saved = localStorage.getItem(STORAGE_KEY);
  if (saved) {
    try {
      controller.state = { ...controller.state, ...JSON.parse(saved) };
    } catch {
      localStorage.removeItem(STORAGE_KEY);
    }
  }

  scatterCanvas.addEventListener('click', (ev) => {
    const rect = scatterCanvas.getBoundingClientRect();
    const hit = hitTest(placed, ev.clientX - rect.left, ev.clientY - rect.top);
    if (hit) {
      controller.select(hit.id);
      controller.setPane('detail');
    }
  });

  slider.addEventListener('change', () => {
    void controller.setThreshold(Number(slider.value));
  });
  slider.addEventListener('input', () => {
    sliderValue.textContent = Number(slider.value).toFixed(2);
  });

  categorySelect.addEventListener('change', () => {
    controller.setCategoryFilter(categorySelect.value || null);
  });

  gridPane.addEventListener('click', (ev) => {
    const target = ev.target as HTMLElement;
    const verdict = target.dataset.verdict as Verdict | undefined;
    const id = target.dataset.id ?? target.closest('figure')?.dataset.id;
    if (verdict && id) {
      void controller.recordVerdict(id, verdict);
    } else if (id) {
      controller.select(id);
    }
  });

  exportButton.addEventListener('click', () => {
    void controller.exportCurated().then((result) => {
      if (result) {
        exportStatus.textContent = `exported ${result.kept} kept images to ${result.path}`;
      }
    });
  });

  void controller.load();
}

document.addEventListener('DOMContentLoaded', main);

import type { EmbeddingPoint, Partition, ViewState } from './types';

/** Visual class of an embedded point, derived from the server partition. */
export type PointKind = 'real' | 'kept' | 'removed';

export function pointKind(point: EmbeddingPoint, partition: Partition): PointKind {
  if (point.origin !== 'generated') return 'real';
  return partition.removed.includes(point.id) ? 'removed' : 'kept';
}

export function initialViewState(): ViewState {
  return { selected: [], categoryFilter: null, threshold: 0, pane: 'scatter' };
}

/** Points surviving the active category filter. */
export function visiblePoints(
  points: EmbeddingPoint[],
  state: ViewState,
): EmbeddingPoint[] {
  if (state.categoryFilter === null) return points;
  return points.filter((p) => p.category === state.categoryFilter);
}

export function toggleSelection(state: ViewState, id: string): ViewState {
  const selected = state.selected.includes(id)
    ? state.selected.filter((s) => s !== id)
    : [...state.selected, id];
  return { ...state, selected };
}

/** Drop selections that no longer exist in the embedding. */
export function pruneSelection(state: ViewState, points: EmbeddingPoint[]): ViewState {
  const known = new Set(points.map((p) => p.id));
  return { ...state, selected: state.selected.filter((id) => known.has(id)) };
}

/** Persistable slice of the view state (survives reload; slider drafts do not). */
export function persistedState(state: ViewState): Omit<ViewState, 'threshold'> {
  const { selected, categoryFilter, pane } = state;
  return { selected, categoryFilter, pane };
}

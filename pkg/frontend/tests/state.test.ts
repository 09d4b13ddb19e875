import { describe, expect, it } from 'vitest';

import {
  initialViewState,
  persistedState,
  pointKind,
  pruneSelection,
  toggleSelection,
  visiblePoints,
} from '../src/state';
import { partition, point } from './helpers';

describe('pointKind', () => {
  it('marks non-generated points as real regardless of partition', () => {
    const part = partition([], ['r-0']);
    expect(pointKind(point('r-0', 'real'), part)).toBe('real');
  });

  it('splits generated points by the server partition only', () => {
    const part = partition(['g-0'], ['g-1']);
    expect(pointKind(point('g-0', 'generated'), part)).toBe('kept');
    expect(pointKind(point('g-1', 'generated'), part)).toBe('removed');
  });
});

describe('view state', () => {
  it('toggles selection on and off', () => {
    let state = initialViewState();
    state = toggleSelection(state, 'a');
    expect(state.selected).toEqual(['a']);
    state = toggleSelection(state, 'a');
    expect(state.selected).toEqual([]);
  });

  it('prunes selections missing from the embedding', () => {
    const state = { ...initialViewState(), selected: ['a', 'ghost'] };
    const pruned = pruneSelection(state, [point('a', 'generated')]);
    expect(pruned.selected).toEqual(['a']);
  });

  it('filters points by category', () => {
    const points = [
      point('a', 'real', 0, 0, 'crack'),
      point('b', 'generated', 0, 0, 'fray'),
    ];
    const all = visiblePoints(points, initialViewState());
    expect(all).toHaveLength(2);
    const only = visiblePoints(points, { ...initialViewState(), categoryFilter: 'fray' });
    expect(only.map((p) => p.id)).toEqual(['b']);
  });

  it('persists everything except the slider draft', () => {
    const state = {
      selected: ['a'],
      categoryFilter: 'crack',
      threshold: 3.5,
      pane: 'grid' as const,
    };
    expect(persistedState(state)).toEqual({
      selected: ['a'],
      categoryFilter: 'crack',
      pane: 'grid',
    });
  });
});

/** Payload shapes of the review service HTTP API. */

export interface EmbeddingPoint {
  id: string;
  x: number;
  y: number;
  origin: 'real' | 'sketch' | 'generated';
  category: string;
}

export interface Partition {
  kept: string[];
  removed: string[];
  threshold: number | null;
  per_category: boolean;
  revision: number;
}

export interface Distances {
  edges: number[];
  counts: number[];
  distances: Record<string, number>;
  threshold: number | null;
}

export interface ManifestEntry {
  id: string;
  path: string;
  category: string;
  origin: string;
  stage: string;
}

export interface Manifest {
  version: number;
  categories: { name: string; role: string }[];
  entries: ManifestEntry[];
}

export interface ExportResult {
  path: string;
  kept: number;
  counts: Record<string, number>;
  manifest: Manifest;
}

export type Verdict = 'accept' | 'reject' | 'undecided';

export type Pane = 'scatter' | 'grid' | 'detail';

/** Client view state; the partition itself is always server truth. */
export interface ViewState {
  selected: string[];
  categoryFilter: string | null;
  threshold: number;
  pane: Pane;
}

import { GalleryApi } from './api';
import {
  initialViewState,
  pruneSelection,
  toggleSelection,
} from './state';
import type {
  Distances,
  EmbeddingPoint,
  ExportResult,
  Pane,
  Partition,
  Verdict,
  ViewState,
} from './types';

export interface SessionData {
  points: EmbeddingPoint[];
  partition: Partition;
  distances: Distances;
}

/**
 * Review-session controller. The partition shown is always the body of the
 * most recent /api/partition fetch; the client never filters locally and
 * never renders optimistically.
 */
export class ReviewController {
  state: ViewState = initialViewState();
  data: SessionData | null = null;

  constructor(
    readonly api: GalleryApi,
    private readonly onChange: (c: ReviewController) => void = () => {},
    private readonly onError: (message: string) => void = () => {},
  ) {}

  async load(): Promise<void> {
    try {
      const [points, partition, distances] = await Promise.all([
        this.api.getEmbedding(),
        this.api.getPartition(),
        this.api.getDistances(),
      ]);
      this.data = { points, partition, distances };
      this.state = pruneSelection(this.state, points);
      if (partition.threshold !== null) {
        this.state = { ...this.state, threshold: partition.threshold };
      }
      this.onChange(this);
    } catch (err) {
      this.onError(`failed to load session: ${(err as Error).message}`);
    }
  }

  private async refetchPartition(): Promise<void> {
    const [partition, distances] = await Promise.all([
      this.api.getPartition(),
      this.api.getDistances(),
    ]);
    if (this.data) this.data = { ...this.data, partition, distances };
    this.onChange(this);
  }

  /** Push a new threshold to the server, then re-render from server truth. */
  async setThreshold(value: number): Promise<void> {
    if (value < 0 || !Number.isFinite(value)) {
      this.onError(`threshold must be a finite value >= 0, got ${value}`);
      return;
    }
    try {
      await this.api.setFilter(value);
      this.state = { ...this.state, threshold: value };
      await this.refetchPartition();
    } catch (err) {
      this.onError(`filter update failed: ${(err as Error).message}`);
    }
  }

  /** Record a human verdict, then re-render from server truth. */
  async recordVerdict(id: string, verdict: Verdict): Promise<void> {
    try {
      await this.api.sendDecision(id, verdict);
      await this.refetchPartition();
    } catch (err) {
      this.onError(`verdict on ${id} failed: ${(err as Error).message}`);
    }
  }

  /** Server-side export; the manifest is returned untouched. */
  async exportCurated(): Promise<ExportResult | null> {
    try {
      return await this.api.exportCurated();
    } catch (err) {
      this.onError(`export failed: ${(err as Error).message}`);
      return null;
    }
  }

  select(id: string): void {
    if (!this.data || !this.data.points.some((p) => p.id === id)) return;
    this.state = toggleSelection(this.state, id);
    this.onChange(this);
  }

  setCategoryFilter(category: string | null): void {
    this.state = { ...this.state, categoryFilter: category };
    this.onChange(this);
  }

  setPane(pane: Pane): void {
    this.state = { ...this.state, pane };
    this.onChange(this);
  }
}

import type {
  Distances,
  EmbeddingPoint,
  ExportResult,
  Manifest,
  Partition,
  Verdict,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = `HTTP ${resp.status}`;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status line */
    }
    throw new ApiError(resp.status, detail);
  }
  return resp.json() as Promise<T>;
}

/** Thin typed client for the review service; all state lives server-side. */
export class GalleryApi {
  constructor(
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base = '',
  ) {}

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.base + path).then((r) => asJson<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.base + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    }).then((r) => asJson<T>(r));
  }

  getManifest(): Promise<Manifest> {
    return this.get('/api/manifest');
  }

  getEmbedding(): Promise<EmbeddingPoint[]> {
    return this.get('/api/embedding');
  }

  getPartition(): Promise<Partition> {
    return this.get('/api/partition');
  }

  getDistances(): Promise<Distances> {
    return this.get('/api/distances');
  }

  setFilter(threshold: number, perCategory?: boolean): Promise<{ revision: number }> {
    const body: Record<string, unknown> = { threshold };
    if (perCategory !== undefined) body.per_category = perCategory;
    return this.post('/api/filter', body);
  }

  sendDecision(id: string, verdict: Verdict, note?: string): Promise<{ revision: number }> {
    return this.post('/api/decisions', { id, verdict, note: note ?? null });
  }

  exportCurated(): Promise<ExportResult> {
    return this.post('/api/export', {});
  }

  imageUrl(id: string): string {
    return `${this.base}/api/images/${encodeURIComponent(id)}`;
  }

  thumbUrl(id: string): string {
    return `${this.base}/api/thumbs/${encodeURIComponent(id)}`;
  }
}

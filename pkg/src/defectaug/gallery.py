"""HTTP review service: exposes the embedding, images, distance
histogram, and partition to the browser client, and persists human
accept/reject verdicts to the append-only decision log.

The partition endpoint always recomputes through the same curator code
path the pipeline uses; filtering logic is never duplicated here.
"""

from __future__ import annotations

import io
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image
from pydantic import BaseModel

from . import curator, pipeline
from .manifest import Manifest, load_manifest, save_manifest
from .manifold import EmbeddingPoint

THUMB_SIZE = 128


def _json_threshold(value: float) -> Optional[float]:
    """An unset (infinite) threshold serializes as null; JSON has no inf."""
    return None if math.isinf(value) else value


class FilterRequest(BaseModel):
    threshold: float
    per_category: Optional[bool] = None


class DecisionRequest(BaseModel):
    id: str
    verdict: str
    note: Optional[str] = None


@dataclass
class SessionState:
    """One review session: immutable manifest + embedding, a mutable
    filter policy, and the decision log."""

    manifest: Manifest
    points: List[EmbeddingPoint]
    policy: curator.FilterPolicy
    decision_log: curator.DecisionLog
    export_path: Path
    static_dir: Optional[Path] = None
    revision: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def from_run_dir(cls, run_dir: Path, config: Optional[dict] = None) -> "SessionState":
        config = config or {}
        fcfg = config.get("filter", {})
        scfg = config.get("serve", {})
        manifest_file = run_dir / "manifest.json"
        embedding_file = run_dir / "embedding.json"
        missing = [str(p) for p in (manifest_file, embedding_file) if not p.exists()]
        if missing:
            raise pipeline.PipelineError(f"serve is missing session inputs: {missing}")
        policy = curator.FilterPolicy(
            threshold=float(fcfg.get("threshold", float("inf"))),
            per_category=bool(fcfg.get("per_category", True)))
        static_dir = scfg.get("static_dir")
        return cls(manifest=load_manifest(manifest_file),
                   points=pipeline.load_embedding(embedding_file),
                   policy=policy,
                   decision_log=curator.DecisionLog(run_dir / "decisions.jsonl"),
                   export_path=run_dir / "curated_manifest.json",
                   static_dir=Path(static_dir) if static_dir else None)

    def generated_ids(self) -> List[str]:
        return [p.id for p in self.points if p.origin == "generated"]

    def partition(self):
        kept, removed, distances = pipeline.compute_partition(
            self.points, self.policy, self.decision_log.load())
        return kept, removed, distances


def create_app(session: SessionState) -> FastAPI:
    app = FastAPI(title="defectaug review gallery")
    entries = session.manifest.by_id()
    thumb_cache: Dict[str, bytes] = {}

    def png_bytes(entry_id: str, thumb: bool) -> bytes:
        if entry_id not in entries:
            raise HTTPException(status_code=404, detail=f"unknown image id {entry_id!r}")
        path = session.manifest.resolve(entries[entry_id])
        if thumb:
            cached = thumb_cache.get(entry_id)
            if cached is not None:
                return cached
            img = Image.open(path)
            img.thumbnail((THUMB_SIZE, THUMB_SIZE))
            buf = io.BytesIO()
            img.save(buf, format="PNG")
            thumb_cache[entry_id] = buf.getvalue()
            return thumb_cache[entry_id]
        return path.read_bytes()

    @app.get("/api/manifest")
    def get_manifest():
        return session.manifest.to_dict()

    @app.get("/api/embedding")
    def get_embedding():
        return [p.to_dict() for p in session.points]

    @app.get("/api/partition")
    def get_partition():
        with session._lock:
            kept, removed, distances = session.partition()
        return {"kept": kept, "removed": removed,
                "threshold": _json_threshold(session.policy.threshold),
                "per_category": session.policy.per_category,
                "revision": session.revision}

    @app.get("/api/distances")
    def get_distances():
        with session._lock:
            _, _, distances = session.partition()
        edges, counts = curator.distance_histogram(distances)
        return {"edges": edges, "counts": counts, "distances": distances,
                "threshold": _json_threshold(session.policy.threshold)}

    @app.get("/api/images/{entry_id}")
    def get_image(entry_id: str):
        return Response(content=png_bytes(entry_id, thumb=False), media_type="image/png")

    @app.get("/api/thumbs/{entry_id}")
    def get_thumb(entry_id: str):
        return Response(content=png_bytes(entry_id, thumb=True), media_type="image/png")

    @app.post("/api/filter")
    def post_filter(req: FilterRequest):
        try:
            policy = curator.FilterPolicy(
                threshold=req.threshold,
                per_category=session.policy.per_category
                if req.per_category is None else req.per_category)
        except curator.CurationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with session._lock:
            session.policy = policy
            session.revision += 1
        return {"threshold": policy.threshold, "per_category": policy.per_category,
                "revision": session.revision}

    @app.post("/api/decisions")
    def post_decision(req: DecisionRequest):
        if req.id not in set(session.generated_ids()):
            raise HTTPException(status_code=404,
                                detail=f"unknown composite id {req.id!r}")
        try:
            decision = curator.ReviewDecision(composite_id=req.id, verdict=req.verdict,
                                              source="human", note=req.note)
        except curator.CurationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with session._lock:
            session.decision_log.append(decision)
            session.revision += 1
        return {"recorded": decision.to_dict(), "revision": session.revision}

    @app.post("/api/export")
    def post_export():
        with session._lock:
            kept, _, _ = session.partition()
            curated, counts = pipeline.export_curated(session.manifest, kept)
            save_manifest(curated, session.export_path)
        return {"path": str(session.export_path), "kept": len(kept), "counts": counts,
                "manifest": json.loads(session.export_path.read_text(encoding="utf-8"))}

    if session.static_dir is not None and session.static_dir.exists():
        app.mount("/", StaticFiles(directory=session.static_dir, html=True), name="ui")

    return app

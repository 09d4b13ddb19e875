"""Curation of generated embeddings: nearest-real distance thresholding,
the append-only human decision log, and curated-manifest export."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .manifold import EmbeddingPoint

log = logging.getLogger(__name__)

VERDICTS = ("accept", "reject", "undecided")


class CurationError(ValueError):
    """Invalid filter input (e.g. a category with no real points)."""


@dataclass(frozen=True)
class FilterPolicy:
    """Keep a generated point iff the distance to its nearest real point
    is <= threshold. With per_category, only real points of the same
    category are compared."""

    threshold: float
    per_category: bool = True

    def __post_init__(self):
        if self.threshold < 0:
            raise CurationError(f"threshold must be >= 0, got {self.threshold}")


@dataclass(frozen=True)
class FilterResult:
    kept: List[str]
    removed: List[str]
    distances: Dict[str, float]


@dataclass(frozen=True)
class ReviewDecision:
    composite_id: str
    verdict: str  # accept | reject | undecided
    source: str = "human"  # human | threshold
    timestamp: str = ""
    note: Optional[str] = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise CurationError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        if not self.timestamp:
            object.__setattr__(self, "timestamp",
                               datetime.now(timezone.utc).isoformat())

    def to_dict(self) -> dict:
        return {"composite_id": self.composite_id, "verdict": self.verdict,
                "source": self.source, "timestamp": self.timestamp, "note": self.note}

    @classmethod
    def from_dict(cls, d: dict) -> "ReviewDecision":
        return cls(composite_id=d["composite_id"], verdict=d["verdict"],
                   source=d.get("source", "human"), timestamp=d.get("timestamp", ""),
                   note=d.get("note"))


def filter_by_distance(points: Sequence[EmbeddingPoint],
                       policy: FilterPolicy) -> FilterResult:
    """Partition the generated points by nearest-real distance.

    Every generated point lands in exactly one of kept/removed; the
    nearest-real distance is reported per id for auditing.
    """
    real = [p for p in points if p.origin == "real"]
    generated = [p for p in points if p.origin == "generated"]

    def nearest(gen: EmbeddingPoint, pool: List[EmbeddingPoint]) -> float:
        coords = np.array([[p.x, p.y] for p in pool])
        d = np.hypot(coords[:, 0] - gen.x, coords[:, 1] - gen.y)
        return float(d.min())

    if policy.per_category:
        real_by_cat: Dict[str, List[EmbeddingPoint]] = {}
        for p in real:
            real_by_cat.setdefault(p.category, []).append(p)

    kept: List[str] = []
    removed: List[str] = []
    distances: Dict[str, float] = {}
    for g in generated:
        if policy.per_category:
            pool = real_by_cat.get(g.category, [])
            if not pool:
                raise CurationError(
                    f"category {g.category!r} has generated points but no real points")
        else:
            pool = real
            if not pool:
                raise CurationError("no real points to compare against")
        d = nearest(g, pool)
        distances[g.id] = d
        (kept if d <= policy.threshold else removed).append(g.id)
    return FilterResult(kept=kept, removed=removed, distances=distances)


def latest_decisions(decisions: Iterable[ReviewDecision]) -> Dict[str, ReviewDecision]:
    """Collapse a decision log to the last verdict per composite id."""
    out: Dict[str, ReviewDecision] = {}
    for d in decisions:
        out[d.composite_id] = d
    return out


def apply_decisions(kept: Sequence[str], decisions: Iterable[ReviewDecision],
                    universe: Optional[Sequence[str]] = None) -> List[str]:
    """Overlay human verdicts on a threshold partition.

    Rejects remove ids from the kept set; accepts re-add ids that only
    the threshold removed. Human verdicts always dominate. Decisions for
    unknown ids are skipped with a warning.
    """
    known = set(universe) if universe is not None else None
    final = latest_decisions(decisions)
    kept_set = set(kept)
    out = [k for k in kept if final.get(k) is None or final[k].verdict != "reject"]
    for cid, d in final.items():
        if known is not None and cid not in known:
            log.warning("decision for unknown composite_id %r skipped", cid)
            continue
        if d.verdict == "accept" and cid not in kept_set:
            out.append(cid)
    return out


class DecisionLog:
    """Append-only JSON-lines store of review decisions.

    Single-writer semantics: appends are serialized by the caller; the
    latest line per composite id wins.
    """

    def __init__(self, path):
        self.path = Path(path)

    def append(self, decision: ReviewDecision) -> None:
        with self.path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(decision.to_dict(), sort_keys=True) + "\n")

    def load(self) -> List[ReviewDecision]:
        if not self.path.exists():
            return []
        out = []
        with self.path.open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    out.append(ReviewDecision.from_dict(json.loads(line)))
        return out


def distance_histogram(distances: Dict[str, float], bins: int = 30
                       ) -> Tuple[List[float], List[int]]:
    """Histogram (edges, counts) of nearest-real distances, for threshold
    calibration in the review UI."""
    if not distances:
        return [0.0, 1.0], [0]
    values = np.array(sorted(distances.values()))
    hi = float(values.max())
    counts, edges = np.histogram(values, bins=bins, range=(0.0, hi if hi > 0 else 1.0))
    return [float(e) for e in edges], [int(c) for c in counts]

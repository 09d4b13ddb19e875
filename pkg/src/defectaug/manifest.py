"""Dataset manifests: the provenance ledger every pipeline stage reads
and extends. Paths are stored relative to the manifest file."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

ORIGINS = ("real", "sketch", "generated")
STAGES = ("raw", "conditioned", "composited", "styled", "curated")
ROLES = ("defect", "free")


class ManifestError(ValueError):
    """Schema violation in a dataset manifest."""


@dataclass
class Category:
    name: str
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ManifestError(f"category {self.name!r}: role must be one of {ROLES}")


@dataclass
class Entry:
    id: str
    path: str  # relative to the manifest file
    category: str
    origin: str
    stage: str
    provenance: Optional[dict] = None

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ManifestError(f"entry {self.id!r}: origin must be one of {ORIGINS}")
        if self.stage not in STAGES:
            raise ManifestError(f"entry {self.id!r}: stage must be one of {STAGES}")


@dataclass
class Manifest:
    version: int
    categories: List[Category]
    entries: List[Entry]
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        names = [c.name for c in self.categories]
        if len(set(names)) != len(names):
            raise ManifestError("duplicate category names")
        seen = set()
        known = set(names)
        for i, e in enumerate(self.entries):
            if e.id in seen:
                raise ManifestError(f"duplicate entry id {e.id!r} (entry {i})")
            seen.add(e.id)
            if e.category not in known:
                raise ManifestError(
                    f"entry {e.id!r} (entry {i}): unknown category {e.category!r}")

    def resolve(self, entry: Entry) -> Path:
        return (self.base_dir / entry.path).resolve()

    def roles(self) -> Dict[str, str]:
        return {c.name: c.role for c in self.categories}

    def by_id(self) -> Dict[str, Entry]:
        return {e.id: e for e in self.entries}

    def counts(self) -> Dict[str, int]:
        out = {c.name: 0 for c in self.categories}
        for e in self.entries:
            out[e.category] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "categories": [{"name": c.name, "role": c.role} for c in self.categories],
            "entries": [
                {k: v for k, v in {
                    "id": e.id, "path": e.path, "category": e.category,
                    "origin": e.origin, "stage": e.stage, "provenance": e.provenance,
                }.items() if not (k == "provenance" and v is None)}
                for e in self.entries
            ],
        }


def load_manifest(path, check_paths: bool = True) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    for key in ("version", "categories", "entries"):
        if key not in raw:
            raise ManifestError(f"{path}: missing {key!r}")
    categories = [Category(**c) for c in raw["categories"]]
    entries = []
    for i, e in enumerate(raw["entries"]):
        try:
            entries.append(Entry(**e))
        except TypeError as exc:
            raise ManifestError(f"{path}: entry {i}: {exc}") from exc
    m = Manifest(version=int(raw["version"]), categories=categories,
                 entries=entries, base_dir=path.parent)
    if check_paths:
        for i, e in enumerate(m.entries):
            if not m.resolve(e).exists():
                raise ManifestError(
                    f"{path}: entry {e.id!r} (entry {i}): missing file {m.resolve(e)}")
    return m


def save_manifest(manifest: Manifest, path) -> None:
    """Canonical write: relocates entry paths relative to the target file
    so save∘load is the identity on the canonical form."""
    path = Path(path)
    target_dir = path.resolve().parent
    relocated = []
    for e in manifest.entries:
        abs_path = (manifest.base_dir / e.path).resolve()
        rel = Path(os.path.relpath(abs_path, target_dir)).as_posix()
        relocated.append(Entry(id=e.id, path=rel, category=e.category,
                               origin=e.origin, stage=e.stage, provenance=e.provenance))
    out = Manifest(version=manifest.version, categories=manifest.categories,
                   entries=relocated, base_dir=target_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out.to_dict(), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")

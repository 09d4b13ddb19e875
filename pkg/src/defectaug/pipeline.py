"""Stage orchestration: compose -> [external style transfer] -> embed ->
filter -> review -> metrics, with a file-exchange contract for the
external learned stages.

Each stage reads only its own subsection of a single JSON config
document and writes deterministic reports (timings go to the log, never
into report files, so reruns are byte-identical)."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import curator, manifold, raster, scoreboard, sketchlab
from .manifest import Entry, Manifest, ManifestError, load_manifest, save_manifest

log = logging.getLogger(__name__)

STAGE_NAMES = ("compose", "embed", "filter", "metrics")


class PipelineError(RuntimeError):
    """Missing prerequisites or invalid stage configuration."""


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _require(paths: Sequence[Path], stage: str) -> None:
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise PipelineError(f"stage {stage!r} is missing prerequisite outputs: {missing}")


def _normalize(img: raster.Raster, size: Optional[Sequence[int]]) -> raster.Raster:
    if size is None or (img.width, img.height) == tuple(size):
        return img
    from PIL import Image
    return raster.Raster(np.asarray(
        Image.fromarray(img.pixels).resize(tuple(size), Image.BILINEAR)))


def _crop_to_mask(img: raster.Raster, mask: raster.Mask, margin: int = 2
                  ) -> Tuple[raster.Raster, raster.Mask]:
    ys, xs = np.nonzero(mask.bits)
    y0, y1 = max(0, ys.min() - margin), min(mask.height, ys.max() + 1 + margin)
    x0, x1 = max(0, xs.min() - margin), min(mask.width, xs.max() + 1 + margin)
    return (raster.Raster(img.pixels[y0:y1, x0:x1].copy()),
            raster.Mask(mask.bits[y0:y1, x0:x1].copy()))


# ---------------------------------------------------------------------------
# compose

def stage_compose(config: dict, manifest_path: Path, out: Path, seed: int) -> dict:
    cfg = config.get("compose", {})
    m = load_manifest(manifest_path)
    roles = m.roles()
    sigma = float(cfg.get("sigma", 1.0))
    threshold = cfg.get("threshold", 128)
    polarity = cfg.get("polarity", "defect-dark")
    normalize_real = cfg.get("normalize_size")  # e.g. [300, 300]; None = off
    counts = cfg.get("count", 0)
    sampler_kwargs = {
        "theta_range": tuple(cfg.get("theta_range", (0.0, 360.0))),
        "p_range": tuple(cfg.get("p_range", (0.5, 1.5))),
        "q_range": tuple(cfg.get("q_range", (0.5, 1.5))),
    }

    bg_categories = cfg.get("background_categories") or [
        c.name for c in m.categories if c.role == "free"]
    backgrounds = []
    for e in m.entries:
        if e.origin == "real" and e.category in bg_categories and e.stage == "raw":
            img = _normalize(raster.read_png(m.resolve(e)), normalize_real)
            backgrounds.append((e.id, img))
    sketches_by_cat: Dict[str, List[Tuple[str, raster.Raster]]] = {}
    for e in m.entries:
        if e.origin == "sketch":
            sketches_by_cat.setdefault(e.category, []).append(
                (e.id, raster.read_png(m.resolve(e))))

    comp_dir = out / "composited"
    mask_dir = out / "masks"
    rec_dir = out / "records"
    for d in (comp_dir, mask_dir, rec_dir):
        d.mkdir(parents=True, exist_ok=True)

    new_entries: List[Entry] = []
    report_counts: Dict[str, int] = {}
    for cat_index, cat in enumerate(sorted(sketches_by_cat)):
        count = counts.get(cat, 0) if isinstance(counts, dict) else int(counts)
        report_counts[cat] = count
        if count == 0:
            continue
        if not backgrounds:
            raise PipelineError("compose: no background images in the manifest")
        entries: List[sketchlab.SketchEntry] = []
        for sid, raw in sketches_by_cat[cat]:
            conditioned = sketchlab.condition_sketch(raw, sigma=sigma)
            thr = raster.otsu_threshold(conditioned) if threshold == "auto" else int(threshold)
            mask = raster.binarize(conditioned, thr, polarity=polarity)
            if mask.count() == 0:
                raise PipelineError(
                    f"compose: sketch {sid!r} produced an empty mask at threshold {thr}")
            patch, patch_mask = _crop_to_mask(conditioned, mask)
            entries.append(sketchlab.SketchEntry(id=sid, image=patch, mask=patch_mask))
        sampler = sketchlab.PlacementSampler(
            seed=int(np.random.SeedSequence([seed, cat_index]).generate_state(1)[0]),
            **sampler_kwargs)
        composites, records = sketchlab.generate_set(
            entries, backgrounds, count, sampler, category=cat)
        for composite, record in zip(composites, records):
            cid = record.composite_id
            raster.write_png(composite, comp_dir / f"{cid}.png")
            _, placed = sketchlab.fuse(
                entries[[e.id for e in entries].index(record.sketch_id)].image,
                entries[[e.id for e in entries].index(record.sketch_id)].mask,
                dict(backgrounds)[record.background_id], record.params)
            raster.write_mask_png(placed, mask_dir / f"{cid}.png")
            _write_json(rec_dir / f"{cid}.json", record.to_dict())
            new_entries.append(Entry(
                id=cid, path=f"composited/{cid}.png", category=cat,
                origin="generated", stage="composited",
                provenance=record.to_dict()))

    merged = Manifest(version=m.version,
                      categories=m.categories,
                      entries=[Entry(id=e.id,
                                     path=Path(m.resolve(e)).as_posix(),
                                     category=e.category, origin=e.origin,
                                     stage=e.stage, provenance=e.provenance)
                               for e in m.entries] + new_entries,
                      base_dir=out)
    save_manifest(merged, out / "manifest.json")
    report = {"stage": "compose", "seed": seed, "counts": report_counts,
              "composites": len(new_entries)}
    _write_json(out / "reports" / "compose.json", report)
    return report


# ---------------------------------------------------------------------------
# embed

def _embed_selection(m: Manifest, include_free: bool) -> List[Entry]:
    roles = m.roles()
    selected = []
    for e in m.entries:
        defect_cat = roles[e.category] == "defect"
        if e.origin == "generated" and e.stage in ("composited", "styled", "curated"):
            selected.append(e)
        elif e.origin == "real" and (defect_cat or include_free):
            selected.append(e)
    return selected


def stage_embed(config: dict, out: Path, seed: int) -> dict:
    cfg = config.get("embed", {})
    manifest_file = out / "manifest.json"
    _require([manifest_file], "embed")
    m = load_manifest(manifest_file)
    entries = _embed_selection(m, bool(cfg.get("include_free", False)))
    if len(entries) < 3:
        raise PipelineError(f"embed: need at least 3 images, found {len(entries)}")
    images = [raster.read_png(m.resolve(e)) for e in entries]
    X = manifold.extract_features(images, d_side=int(cfg.get("d_side", 32)))
    tsne_cfg = manifold.TsneConfig(
        perplexity=min(float(cfg.get("perplexity", 30.0)), float(len(entries) - 1)),
        iterations=int(cfg.get("iterations", 1000)),
        learning_rate=float(cfg.get("learning_rate", 200.0)),
        early_exaggeration=float(cfg.get("early_exaggeration", 4.0)),
        seed=seed)
    points, kl_initial, kl_final = manifold.embed(
        X,
        ids=[e.id for e in entries],
        origins=["generated" if e.origin == "generated" else "real" for e in entries],
        categories=[e.category for e in entries],
        cfg=tsne_cfg)
    _write_json(out / "embedding.json", [p.to_dict() for p in points])
    report = {"stage": "embed", "seed": seed, "points": len(points),
              "kl_initial": kl_initial, "kl_final": kl_final,
              "perplexity": tsne_cfg.perplexity, "iterations": tsne_cfg.iterations}
    _write_json(out / "reports" / "embed.json", report)
    return report


def load_embedding(path) -> List[manifold.EmbeddingPoint]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [manifold.EmbeddingPoint(id=d["id"], x=d["x"], y=d["y"],
                                    origin=d["origin"], category=d["category"])
            for d in data]


# ---------------------------------------------------------------------------
# filter

def export_curated(m: Manifest, kept: Sequence[str]) -> Tuple[Manifest, Dict[str, int]]:
    """Manifest restricted to kept composites (plus all non-generated
    entries), provenance retained; per-category kept counts reported."""
    kept_set = set(kept)
    ids = {e.id for e in m.entries}
    unknown = kept_set - ids
    if unknown:
        raise PipelineError(f"kept ids not in manifest: {sorted(unknown)}")
    entries = []
    counts = {c.name: 0 for c in m.categories}
    for e in m.entries:
        if e.origin != "generated":
            entries.append(e)
        elif e.id in kept_set:
            entries.append(Entry(id=e.id, path=e.path, category=e.category,
                                 origin=e.origin, stage="curated",
                                 provenance=e.provenance))
            counts[e.category] += 1
    curated = Manifest(version=m.version, categories=m.categories,
                       entries=entries, base_dir=m.base_dir)
    return curated, counts


def compute_partition(points: Sequence[manifold.EmbeddingPoint],
                      policy: curator.FilterPolicy,
                      decisions: Sequence[curator.ReviewDecision]
                      ) -> Tuple[List[str], List[str], Dict[str, float]]:
    """Single source of truth for the kept/removed partition: threshold
    filter composed with human decisions."""
    result = curator.filter_by_distance(points, policy)
    universe = [p.id for p in points if p.origin == "generated"]
    kept = curator.apply_decisions(result.kept, decisions, universe=universe)
    kept_set = set(kept)
    removed = [i for i in universe if i not in kept_set]
    return kept, removed, result.distances


def stage_filter(config: dict, out: Path, seed: int) -> dict:
    cfg = config.get("filter", {})
    manifest_file = out / "manifest.json"
    embedding_file = out / "embedding.json"
    _require([manifest_file, embedding_file], "filter")
    m = load_manifest(manifest_file)
    points = load_embedding(embedding_file)
    threshold = cfg.get("threshold", float("inf"))
    policy = curator.FilterPolicy(
        threshold=float(threshold),
        per_category=bool(cfg.get("per_category", True)))
    decisions = curator.DecisionLog(out / "decisions.jsonl").load()
    kept, removed, distances = compute_partition(points, policy, decisions)
    _write_json(out / "partition.json",
                {"kept": sorted(kept), "removed": sorted(removed),
                 "distances": {k: distances[k] for k in sorted(distances)}})
    curated, counts = export_curated(m, kept)
    save_manifest(curated, out / "curated_manifest.json")
    report = {"stage": "filter", "seed": seed,
              "threshold": threshold if threshold != float("inf") else "inf",
              "per_category": policy.per_category,
              "kept": len(kept), "removed": len(removed), "counts": counts}
    _write_json(out / "reports" / "filter.json", report)
    return report


# ---------------------------------------------------------------------------
# metrics

def stage_metrics(config: dict, out: Path, seed: int) -> dict:
    cfg = config.get("metrics", {})
    pred_path = Path(cfg.get("predictions", out / "predictions.csv"))
    _require([pred_path], "metrics")
    _, truth, pred = scoreboard.read_predictions(pred_path)
    labels = cfg.get("labels") or sorted(set(truth) | set(pred))
    cm = scoreboard.tally(truth, pred, labels)
    mode = cfg.get("mode", "binary")
    if mode == "binary":
        report_obj = scoreboard.binary_metrics(cm)
    else:
        report_obj = scoreboard.multiclass_metrics(
            cm, mode=mode, free_label=cfg.get("free_label", "Free"))
    text, record = scoreboard.format_report(report_obj)
    record["labels"] = list(labels)
    record["confusion"] = cm.counts.tolist()
    (out / "reports").mkdir(parents=True, exist_ok=True)
    (out / "reports" / "metrics.txt").write_text(text, encoding="utf-8")
    _write_json(out / "reports" / "metrics.json", record)
    report = {"stage": "metrics", "seed": seed, "samples": cm.total, "mode": mode}
    _write_json(out / "reports" / "metrics_stage.json", report)
    return report


# ---------------------------------------------------------------------------
# external stage contract

@dataclass
class StageContract:
    """File-exchange contract for an external stage (e.g. style transfer):
    one output image per input id, same file stem, decodable, and
    matching dimensions."""

    input_dir: Path
    output_dir: Path
    expected: Optional[Dict[str, int]] = None


@dataclass
class VerificationReport:
    missing_ids: List[str] = field(default_factory=list)
    extra_ids: List[str] = field(default_factory=list)
    undecodable: List[str] = field(default_factory=list)
    dimension_mismatches: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing_ids or self.extra_ids or self.undecodable
                    or self.dimension_mismatches)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "missing_ids": self.missing_ids,
                "extra_ids": self.extra_ids, "undecodable": self.undecodable,
                "dimension_mismatches": self.dimension_mismatches}


def verify_external_stage(contract: StageContract) -> VerificationReport:
    report = VerificationReport()
    inputs = {p.stem: p for p in sorted(Path(contract.input_dir).glob("*.png"))}
    outputs = {p.stem: p for p in sorted(Path(contract.output_dir).glob("*.png"))}
    report.missing_ids = sorted(set(inputs) - set(outputs))
    report.extra_ids = sorted(set(outputs) - set(inputs))
    for stem in sorted(set(inputs) & set(outputs)):
        try:
            out_img = raster.read_png(outputs[stem])
        except Exception:
            report.undecodable.append(stem)
            continue
        in_img = raster.read_png(inputs[stem])
        if (in_img.width, in_img.height) != (out_img.width, out_img.height):
            report.dimension_mismatches.append({
                "id": stem,
                "expected": [in_img.width, in_img.height],
                "actual": [out_img.width, out_img.height]})
    return report


def ingest_styled(out: Path, styled_dir: Path) -> int:
    """Point composited manifest entries at their styled counterparts."""
    manifest_file = out / "manifest.json"
    _require([manifest_file], "ingest-styled")
    m = load_manifest(manifest_file)
    styled_dir = Path(styled_dir)
    updated = 0
    entries = []
    for e in m.entries:
        styled = styled_dir / f"{e.id}.png"
        if e.origin == "generated" and e.stage == "composited" and styled.exists():
            rel = Path(styled.resolve()).as_posix()
            entries.append(Entry(id=e.id, path=rel, category=e.category,
                                 origin=e.origin, stage="styled",
                                 provenance=e.provenance))
            updated += 1
        else:
            entries.append(Entry(id=e.id, path=Path(m.resolve(e)).as_posix(),
                                 category=e.category, origin=e.origin,
                                 stage=e.stage, provenance=e.provenance))
    save_manifest(Manifest(version=m.version, categories=m.categories,
                           entries=entries, base_dir=out), manifest_file)
    return updated


# ---------------------------------------------------------------------------
# dispatch

def run_stage(name: str, config: dict, manifest_path: Optional[Path],
              out: Path, seed: int) -> dict:
    """Execute one named internal stage and return its report."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    if name == "compose":
        if manifest_path is None:
            raise PipelineError("compose requires --manifest")
        report = stage_compose(config, Path(manifest_path), out, seed)
    elif name == "embed":
        report = stage_embed(config, out, seed)
    elif name == "filter":
        report = stage_filter(config, out, seed)
    elif name == "metrics":
        report = stage_metrics(config, out, seed)
    else:
        raise PipelineError(f"unknown stage {name!r}; choose from {STAGE_NAMES}")
    log.info("stage %s finished in %.2fs", name, time.monotonic() - started)
    return report

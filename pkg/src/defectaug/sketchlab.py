"""Synthetic sketch generation: condition expert drawings, expand small
sets by augmentation, and fuse masked defect patches onto backgrounds
with randomized, fully reproducible placement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .raster import (
    AffineParams,
    Mask,
    Raster,
    RasterError,
    crop,
    rotate,
    to_grayscale,
    translate,
    warp,
    warped_extent,
    zoom,
    gaussian_blur,
)

MAX_PLACEMENT_RETRIES = 100


class GenerationError(RuntimeError):
    """Composite generation could not satisfy its placement constraints."""


class PlacementError(RasterError):
    """Transformed patch does not fit inside the background."""

    def __init__(self, message: str, params: AffineParams):
        super().__init__(f"{message} (params: theta={params.theta}, p={params.p}, "
                         f"q={params.q}, center={params.center})")
        self.params = params


@dataclass(frozen=True)
class CompositionRecord:
    """Full provenance of one synthetic composite; replaying the same
    (sketch, background, params) triple reproduces it bit-exactly."""

    composite_id: str
    sketch_id: str
    background_id: str
    params: AffineParams
    seed: int
    category: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"]["center"] = list(self.params.center)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CompositionRecord":
        p = d["params"]
        params = AffineParams(theta=p["theta"], p=p["p"], q=p["q"],
                              center=(p["center"][0], p["center"][1]))
        return cls(composite_id=d["composite_id"], sketch_id=d["sketch_id"],
                   background_id=d["background_id"], params=params,
                   seed=int(d["seed"]), category=d["category"])


@dataclass(frozen=True)
class PlacementSampler:
    """Seeded sampler for placement transforms.

    theta is uniform over ``theta_range`` degrees, p and q uniform over
    their positive ranges, and the center uniform over all integer
    coordinates where the transformed patch fits the background.
    """

    theta_range: Tuple[float, float] = (0.0, 360.0)
    p_range: Tuple[float, float] = (0.5, 1.5)
    q_range: Tuple[float, float] = (0.5, 1.5)
    seed: int = 0

    def __post_init__(self):
        if self.p_range[0] <= 0 or self.q_range[0] <= 0:
            raise RasterError("scale ranges must be positive")

    def sample_params(self, rng: np.random.Generator,
                      patch_w: int, patch_h: int,
                      bg_w: int, bg_h: int) -> AffineParams:
        """Draw one valid placement, retrying out-of-bounds transforms."""
        for _ in range(MAX_PLACEMENT_RETRIES):
            theta = float(rng.uniform(*self.theta_range))
            p = float(rng.uniform(*self.p_range))
            q = float(rng.uniform(*self.q_range))
            probe = AffineParams(theta=theta, p=p, q=q, center=(0.0, 0.0))
            out_w, out_h, _, _ = warped_extent(patch_w, patch_h, probe)
            lo_x = out_w // 2
            hi_x = bg_w - out_w + lo_x  # keeps left >= 0 and left + out_w <= bg_w
            lo_y = out_h // 2
            hi_y = bg_h - out_h + lo_y
            if hi_x < lo_x or hi_y < lo_y:
                continue
            cx = int(rng.integers(lo_x, hi_x + 1))
            cy = int(rng.integers(lo_y, hi_y + 1))
            return AffineParams(theta=theta, p=p, q=q, center=(cx, cy))
        raise GenerationError(
            f"no valid placement found in {MAX_PLACEMENT_RETRIES} tries for a "
            f"{patch_w}x{patch_h} patch on a {bg_w}x{bg_h} background")


def condition_sketch(raw: Raster, sigma: float = 1.0) -> Raster:
    """Grayscale (if needed) then Gaussian blur a raw expert drawing."""
    gray = to_grayscale(raw) if raw.channels == 3 else raw
    return gaussian_blur(gray, sigma)


def _augment_same_size(img: Raster, rng: np.random.Generator) -> Raster:
    """One random geometric variant with the original dimensions."""
    op = rng.choice(["translate", "rotate", "zoom", "crop", "clip"])
    w, h = img.width, img.height
    if op == "translate":
        dx = int(rng.integers(-(w // 4), w // 4 + 1))
        dy = int(rng.integers(-(h // 4), h // 4 + 1))
        return translate(img, dx, dy)
    if op == "rotate":
        return rotate(img, float(rng.uniform(0.0, 360.0)))
    if op == "zoom":
        factor = float(rng.uniform(1.0, 1.5))
        zoomed = zoom(img, factor)
        x = (zoomed.width - w) // 2
        y = (zoomed.height - h) // 2
        return crop(zoomed, x, y, w, h)
    if op == "crop":
        cw = int(rng.integers(max(1, int(w * 0.6)), w + 1))
        ch = int(rng.integers(max(1, int(h * 0.6)), h + 1))
        x = int(rng.integers(0, w - cw + 1))
        y = int(rng.integers(0, h - ch + 1))
        return zoom(crop(img, x, y, cw, ch), max(w / cw, h / ch)) if (cw, ch) != (w, h) \
            else Raster(img.pixels.copy())
    # clip: trim a small margin, then resize back
    margin = int(rng.integers(1, max(2, min(w, h) // 8)))
    clipped = crop(img, margin, margin, w - 2 * margin, h - 2 * margin)
    return zoom(clipped, max(w / clipped.width, h / clipped.height))


def expand(images: Sequence[Raster], target_count: int, sampler: PlacementSampler) -> List[Raster]:
    """Grow a set to ``target_count`` by appending augmented variants.

    Originals come first, unchanged; variants cycle through the set.
    Deterministic under the sampler's seed.
    """
    if not images:
        raise RasterError("cannot expand an empty image set")
    if target_count < len(images):
        raise RasterError(f"target_count {target_count} < set size {len(images)}")
    rng = np.random.default_rng(np.random.SeedSequence(sampler.seed))
    out = list(images)
    i = 0
    while len(out) < target_count:
        out.append(_augment_same_size(images[i % len(images)], rng))
        i += 1
    return out


def fuse(defect: Raster, mask: Mask, background: Raster,
         params: AffineParams) -> Tuple[Raster, Mask]:
    """Warp the defect patch and composite it onto the background.

    Under the placed patch, output pixels take the warped defect value
    where the warped mask bit is 1 and the background value elsewhere.
    Returns the composite and the placed full-frame mask.
    """
    warped_img, warped_mask = warp(defect, mask, params)
    pw, ph = warped_img.width, warped_img.height
    cx, cy = params.center
    left = int(math.floor(cx - pw / 2.0 + 0.5))
    top = int(math.floor(cy - ph / 2.0 + 0.5))
    if left < 0 or top < 0 or left + pw > background.width or top + ph > background.height:
        raise PlacementError(
            f"{pw}x{ph} patch at ({left},{top}) exceeds "
            f"{background.width}x{background.height} background", params)

    composite = background.pixels.copy()
    bits = warped_mask.bits.astype(bool)
    region = composite[top:top + ph, left:left + pw]
    patch = warped_img.pixels
    if background.channels == 3 and warped_img.channels == 1:
        patch = np.stack([patch] * 3, axis=2)
    elif background.channels == 1 and warped_img.channels == 3:
        raise RasterError("cannot fuse a color defect onto a grayscale background")
    region[bits] = patch[bits]

    placed = np.zeros((background.height, background.width), dtype=np.uint8)
    placed[top:top + ph, left:left + pw] = warped_mask.bits
    return Raster(composite), Mask(placed)


@dataclass(frozen=True)
class SketchEntry:
    """A conditioned sketch with its binarized mask, keyed for provenance."""

    id: str
    image: Raster
    mask: Mask


def generate_set(sketches: Sequence[SketchEntry],
                 backgrounds: Sequence[Tuple[str, Raster]],
                 count: int,
                 sampler: PlacementSampler,
                 category: str,
                 id_prefix: Optional[str] = None) -> Tuple[List[Raster], List[CompositionRecord]]:
    """Generate ``count`` composites with uniform (sketch, background)
    choice and sampled placements; one CompositionRecord per composite.

    The random stream is split per draw index, so the output is
    identical whether draws run serially or in parallel.
    """
    if not sketches or not backgrounds:
        raise RasterError("sketch and background sets must be non-empty")
    if count < 1:
        raise RasterError(f"count must be >= 1, got {count}")
    prefix = id_prefix if id_prefix is not None else category
    streams = np.random.SeedSequence(sampler.seed).spawn(count)
    composites: List[Raster] = []
    records: List[CompositionRecord] = []
    for i, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        sk = sketches[int(rng.integers(0, len(sketches)))]
        bg_id, bg = backgrounds[int(rng.integers(0, len(backgrounds)))]
        params = sampler.sample_params(rng, sk.image.width, sk.image.height,
                                       bg.width, bg.height)
        composite, _ = fuse(sk.image, sk.mask, bg, params)
        composites.append(composite)
        records.append(CompositionRecord(
            composite_id=f"{prefix}-{i:05d}", sketch_id=sk.id,
            background_id=bg_id, params=params, seed=sampler.seed,
            category=category))
    return composites, records


def replay(record: CompositionRecord,
           sketches: Dict[str, SketchEntry],
           backgrounds: Dict[str, Raster]) -> Raster:
    """Rebuild a composite bit-exactly from its provenance record."""
    sk = sketches[record.sketch_id]
    bg = backgrounds[record.background_id]
    composite, _ = fuse(sk.image, sk.mask, bg, record.params)
    return composite

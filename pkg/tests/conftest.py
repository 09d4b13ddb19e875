import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from defectaug.raster import Mask, Raster


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_raster(rng, w, h, channels=1):
    shape = (h, w) if channels == 1 else (h, w, 3)
    return Raster(rng.integers(0, 256, size=shape, dtype=np.uint8))


def random_mask(rng, w, h, density=0.3):
    return Mask((rng.random((h, w)) < density).astype(np.uint8))


def blob_mask(w, h, margin=1):
    """Solid rectangle of ones with a zero border."""
    bits = np.zeros((h, w), dtype=np.uint8)
    bits[margin:h - margin, margin:w - margin] = 1
    return Mask(bits)


def sketch_image(rng, w=40, h=40):
    """Grayscale sketch: dark irregular blob on a light background."""
    pixels = rng.integers(200, 256, size=(h, w), dtype=np.uint8)
    cy, cx = h // 2, w // 2
    yy, xx = np.mgrid[0:h, 0:w]
    r = min(w, h) // 4
    blob = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    pixels[blob] = rng.integers(0, 60, size=int(blob.sum()), dtype=np.uint8)
    return Raster(pixels)


def build_demo_dataset(root, seed=0, sketch_counts=None, backgrounds=3,
                       real_defects=2, bg_size=(96, 96)):
    """Write a small on-disk dataset + manifest for pipeline tests.

    Categories: defect categories from sketch_counts (default crack/fray,
    3 sketches each) plus one free category holding the backgrounds.
    Returns the manifest path.
    """
    import json

    from defectaug.raster import write_png

    root = Path(root)
    sketch_counts = sketch_counts or {"crack": 3, "fray": 3}
    rng_local = np.random.default_rng(seed)
    (root / "images").mkdir(parents=True, exist_ok=True)

    categories = [{"name": name, "role": "defect"} for name in sorted(sketch_counts)]
    categories.append({"name": "free", "role": "free"})
    entries = []

    def add(entry_id, img, category, origin, stage="raw"):
        rel = f"images/{entry_id}.png"
        write_png(img, root / rel)
        entries.append({"id": entry_id, "path": rel, "category": category,
                        "origin": origin, "stage": stage})

    for cat in sorted(sketch_counts):
        for i in range(sketch_counts[cat]):
            add(f"sketch-{cat}-{i}", sketch_image(rng_local), cat, "sketch")
        for i in range(real_defects):
            add(f"real-{cat}-{i}", random_raster(rng_local, *bg_size), cat, "real")
    for i in range(backgrounds):
        add(f"bg-{i}", random_raster(rng_local, *bg_size), "free", "real")

    manifest = {"version": 1, "categories": categories, "entries": entries}
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return path

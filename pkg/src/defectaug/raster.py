"""Image primitives: rasters, binary masks, and the low-level transforms
used when turning defect sketches into composites.

All pixel math is done in float64 and quantized back to uint8 with
round-half-up, so results are reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from PIL import Image


class RasterError(ValueError):
    """Invalid raster/mask input or parameters."""


def _round_half_up(a: np.ndarray) -> np.ndarray:
    return np.floor(a + 0.5)


def _quantize(a: np.ndarray) -> np.ndarray:
    return np.clip(_round_half_up(a), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Raster:
    """2-D pixel grid, grayscale (h, w) or RGB (h, w, 3), uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.pixels)
        if a.ndim == 2:
            pass
        elif a.ndim == 3 and a.shape[2] == 3:
            pass
        else:
            raise RasterError(f"raster must be (h, w) or (h, w, 3), got {a.shape}")
        if a.size == 0:
            raise RasterError("raster must have at least one pixel")
        if a.dtype != np.uint8:
            if np.issubdtype(a.dtype, np.floating):
                raise RasterError("raster pixels must be integers in [0, 255]")
            if a.min() < 0 or a.max() > 255:
                raise RasterError("raster intensities must lie in [0, 255]")
            a = a.astype(np.uint8)
        object.__setattr__(self, "pixels", a)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    def __eq__(self, other) -> bool:
        return isinstance(other, Raster) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class Mask:
    """Binary raster marking defect pixels, values in {0, 1}."""

    bits: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.bits)
        if a.ndim != 2 or a.size == 0:
            raise RasterError(f"mask must be a non-empty (h, w) array, got {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise RasterError("mask values must be exactly 0 or 1")
        object.__setattr__(self, "bits", a.astype(np.uint8))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, Mask) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class AffineParams:
    """Placement transform: scale x by p and y by q, rotate theta degrees
    counterclockwise about the patch center, center the result at
    ``center`` in the background frame."""

    theta: float
    p: float
    q: float
    center: Tuple[float, float]

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise RasterError(f"scale factors must be positive, got p={self.p}, q={self.q}")

    @classmethod
    def identity(cls, center=(0.0, 0.0)) -> "AffineParams":
        return cls(theta=0.0, p=1.0, q=1.0, center=center)


# ---------------------------------------------------------------------------
# PNG I/O

def read_png(path) -> Raster:
    img = Image.open(path)
    if img.mode not in ("L", "RGB"):
        img = img.convert("RGB") if img.mode in ("RGBA", "P", "CMYK") else img.convert("L")
    return Raster(np.asarray(img))


def write_png(raster: Raster, path) -> None:
    Image.fromarray(raster.pixels).save(path, format="PNG")


def read_mask_png(path) -> Mask:
    a = np.asarray(Image.open(path).convert("L"))
    return Mask((a >= 128).astype(np.uint8))


def write_mask_png(mask: Mask, path) -> None:
    Image.fromarray((mask.bits * 255).astype(np.uint8)).save(path, format="PNG")


# ---------------------------------------------------------------------------
# Point transforms

def to_grayscale(img: Raster) -> Raster:
    """Luminance-weighted grayscale: 0.299 R + 0.587 G + 0.114 B."""
    if img.channels != 3:
        raise RasterError("to_grayscale expects a 3-channel raster")
    rgb = img.pixels.astype(np.float64)
    lum = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return Raster(_quantize(lum))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian kernel of radius ceil(3*sigma)."""
    if sigma <= 0:
        raise RasterError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: Raster, sigma: float) -> Raster:
    """Separable Gaussian blur with edge replication at the borders."""
    kernel = gaussian_kernel(sigma)
    radius = len(kernel) // 2

    def blur_plane(plane: np.ndarray) -> np.ndarray:
        padded = np.pad(plane, ((radius, radius), (0, 0)), mode="edge")
        out = np.zeros_like(plane, dtype=np.float64)
        for i, w in enumerate(kernel):
            out += w * padded[i:i + plane.shape[0], :]
        padded = np.pad(out, ((0, 0), (radius, radius)), mode="edge")
        out = np.zeros_like(plane, dtype=np.float64)
        for i, w in enumerate(kernel):
            out += w * padded[:, i:i + plane.shape[1]]
        return out

    a = img.pixels.astype(np.float64)
    if img.channels == 1:
        return Raster(_quantize(blur_plane(a)))
    planes = [blur_plane(a[:, :, c]) for c in range(3)]
    return Raster(_quantize(np.stack(planes, axis=2)))


def otsu_threshold(img: Raster) -> int:
    """Inter-class-variance maximizing threshold for auto binarization."""
    if img.channels != 1:
        raise RasterError("otsu_threshold expects a grayscale raster")
    hist = np.bincount(img.pixels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    weights = np.cumsum(hist)
    means = np.cumsum(hist * np.arange(256))
    mean_total = means[-1]
    w0 = weights
    w1 = total - weights
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = means / w0
        mu1 = (mean_total - means) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between))


def binarize(img: Raster, threshold: int, polarity: str = "defect-dark") -> Mask:
    """Threshold a grayscale raster into a defect mask.

    With polarity ``defect-dark`` (default: dark strokes on light paper)
    a bit is 1 where pixel < threshold; with ``defect-bright`` where
    pixel > threshold. Pixels equal to the threshold are always 0.
    """
    if img.channels != 1:
        raise RasterError("binarize expects a grayscale raster")
    if not (0 <= threshold <= 255):
        raise RasterError(f"threshold must be in [0, 255], got {threshold}")
    if polarity == "defect-dark":
        bits = img.pixels < threshold
    elif polarity == "defect-bright":
        bits = img.pixels > threshold
    else:
        raise RasterError(f"unknown polarity {polarity!r}")
    return Mask(bits.astype(np.uint8))


# ---------------------------------------------------------------------------
# Affine warp

def _forward_matrix(theta: float) -> np.ndarray:
    # Counterclockwise rotation in image coordinates (y pointing down).
    t = math.radians(theta)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [-s, c]], dtype=np.float64)


def warped_extent(width: int, height: int, params: AffineParams) -> Tuple[int, int, float, float]:
    """Output canvas size and bounding-box origin for a warped patch."""
    m = _forward_matrix(params.theta)
    cx, cy = width / 2.0, height / 2.0
    corners = np.array([[0, 0], [width, 0], [0, height], [width, height]], dtype=np.float64)
    scaled = (corners - [cx, cy]) * [params.p, params.q]
    rotated = scaled @ m.T
    minx, miny = rotated.min(axis=0)
    maxx, maxy = rotated.max(axis=0)
    out_w = max(1, math.ceil(maxx - minx - 1e-9))
    out_h = max(1, math.ceil(maxy - miny - 1e-9))
    if maxx - minx <= 0 or maxy - miny <= 0:
        raise RasterError("degenerate warp: zero-area bounding box")
    return out_w, out_h, minx, miny


def _source_coords(out_w: int, out_h: int, minx: float, miny: float,
                   width: int, height: int, params: AffineParams):
    m = _forward_matrix(params.theta)
    cols = minx + np.arange(out_w, dtype=np.float64) + 0.5
    rows = miny + np.arange(out_h, dtype=np.float64) + 0.5
    ox, oy = np.meshgrid(cols, rows)
    # Inverse of rotate-after-scale: rotate back, then unscale.
    ux = m[0, 0] * ox + m[1, 0] * oy
    uy = m[0, 1] * ox + m[1, 1] * oy
    sx = ux / params.p + width / 2.0
    sy = uy / params.q + height / 2.0
    return sx, sy


def _bilinear(plane: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    x = sx - 0.5
    y = sy - 0.5
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0
    out = np.zeros(sx.shape, dtype=np.float64)
    for dy, wy in ((0, 1.0 - fy), (1, fy)):
        for dx, wx in ((0, 1.0 - fx), (1, fx)):
            xi = np.clip(x0 + dx, 0, w - 1)
            yi = np.clip(y0 + dy, 0, h - 1)
            inside = (x0 + dx >= 0) & (x0 + dx <= w - 1) & (y0 + dy >= 0) & (y0 + dy <= h - 1)
            out += np.where(inside, wy * wx * plane[yi, xi], 0.0)
    return out


def warp(img: Raster, mask: Mask, params: AffineParams) -> Tuple[Raster, Mask]:
    """Apply the same affine map to an image and its mask.

    Inverse mapping; bilinear sampling for the image, nearest-neighbor
    for the mask (keeps bits binary). Samples falling outside the source
    give mask 0.
    """
    if (img.width, img.height) != (mask.width, mask.height):
        raise RasterError("image and mask dimensions must match")
    out_w, out_h, minx, miny = warped_extent(img.width, img.height, params)
    sx, sy = _source_coords(out_w, out_h, minx, miny, img.width, img.height, params)

    ix = np.floor(sx).astype(np.int64)
    iy = np.floor(sy).astype(np.int64)
    inside = (ix >= 0) & (ix < img.width) & (iy >= 0) & (iy < img.height)
    bits = np.zeros((out_h, out_w), dtype=np.uint8)
    bits[inside] = mask.bits[iy[inside], ix[inside]]

    if img.channels == 1:
        warped = _quantize(_bilinear(img.pixels.astype(np.float64), sx, sy))
    else:
        planes = [_bilinear(img.pixels[:, :, c].astype(np.float64), sx, sy) for c in range(3)]
        warped = _quantize(np.stack(planes, axis=2))
    return Raster(warped), Mask(bits)


# ---------------------------------------------------------------------------
# Deterministic augmentation ops (semantic label preserved)

def crop(img: Raster, x: int, y: int, width: int, height: int) -> Raster:
    if width < 1 or height < 1 or x < 0 or y < 0 or x + width > img.width or y + height > img.height:
        raise RasterError(
            f"crop window ({x},{y},{width},{height}) outside {img.width}x{img.height} image")
    return Raster(img.pixels[y:y + height, x:x + width].copy())


def clip(img: Raster, left: int = 0, top: int = 0, right: int = 0, bottom: int = 0) -> Raster:
    """Trim margins off the frame edges."""
    if min(left, top, right, bottom) < 0:
        raise RasterError("clip margins must be non-negative")
    return crop(img, left, top, img.width - left - right, img.height - top - bottom)


def zoom(img: Raster, factor: float) -> Raster:
    """Rescale both axes by ``factor`` with bilinear resampling."""
    if factor <= 0:
        raise RasterError(f"zoom factor must be positive, got {factor}")
    out_w = max(1, math.ceil(img.width * factor - 1e-9))
    out_h = max(1, math.ceil(img.height * factor - 1e-9))
    sx = (np.arange(out_w, dtype=np.float64) + 0.5) * (img.width / out_w)
    sy = (np.arange(out_h, dtype=np.float64) + 0.5) * (img.height / out_h)
    gx, gy = np.meshgrid(sx, sy)
    if img.channels == 1:
        return Raster(_quantize(_bilinear(img.pixels.astype(np.float64), gx, gy)))
    planes = [_bilinear(img.pixels[:, :, c].astype(np.float64), gx, gy) for c in range(3)]
    return Raster(_quantize(np.stack(planes, axis=2)))


def translate(img: Raster, dx: int, dy: int) -> Raster:
    """Shift within the canvas; vacated pixels replicate the nearest edge."""
    if abs(dx) >= img.width or abs(dy) >= img.height:
        raise RasterError(f"translation ({dx},{dy}) moves the image fully off canvas")
    src_x = np.clip(np.arange(img.width) - dx, 0, img.width - 1)
    src_y = np.clip(np.arange(img.height) - dy, 0, img.height - 1)
    return Raster(img.pixels[np.ix_(src_y, src_x)].copy())


def rotate(img: Raster, theta: float) -> Raster:
    """Rotate about the image center on an unchanged canvas; samples
    falling outside the source replicate the nearest edge."""
    m = _forward_matrix(theta)
    cx, cy = img.width / 2.0, img.height / 2.0
    cols = np.arange(img.width, dtype=np.float64) + 0.5 - cx
    rows = np.arange(img.height, dtype=np.float64) + 0.5 - cy
    ox, oy = np.meshgrid(cols, rows)
    sx = m[0, 0] * ox + m[1, 0] * oy + cx
    sy = m[0, 1] * ox + m[1, 1] * oy + cy
    sx = np.clip(sx, 0.5, img.width - 0.5)
    sy = np.clip(sy, 0.5, img.height - 0.5)
    if img.channels == 1:
        return Raster(_quantize(_bilinear(img.pixels.astype(np.float64), sx, sy)))
    planes = [_bilinear(img.pixels[:, :, c].astype(np.float64), sx, sy) for c in range(3)]
    return Raster(_quantize(np.stack(planes, axis=2)))


_AUGMENT_OPS = {
    "clip": clip,
    "crop": crop,
    "zoom": zoom,
    "translate": translate,
    "rotate": rotate,
}


def augment(img: Raster, op: str, **op_params) -> Raster:
    """Dispatch a deterministic geometric augmentation op."""
    if op not in _AUGMENT_OPS:
        raise RasterError(f"unknown augmentation op {op!r}; choose from {sorted(_AUGMENT_OPS)}")
    return _AUGMENT_OPS[op](img, **op_params)

"""Exact t-SNE: pixel features, perplexity-calibrated Gaussian
affinities, Student-t low-dimensional affinities, and momentum gradient
descent on the KL divergence.

Normalization of the low-dimensional affinities is over all ordered
pairs, which makes the closed-form gradient exactly the gradient of the
KL cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image
from sklearn.base import BaseEstimator

from .raster import Raster, to_grayscale

PROB_FLOOR = 1e-12
PERPLEXITY_TOL = 1e-5
SIGMA_SEARCH_MAX_ITER = 50


class ManifoldError(ValueError):
    """Invalid embedding input or diverged optimization."""


@dataclass(frozen=True)
class EmbeddingPoint:
    """One embedded image: 2-D coordinate plus identity tags."""

    id: str
    x: float
    y: float
    origin: str  # "real" | "generated"
    category: str

    def to_dict(self) -> dict:
        return {"id": self.id, "x": self.x, "y": self.y,
                "origin": self.origin, "category": self.category}


@dataclass
class TsneConfig:
    """Optimizer settings; defaults follow common exact-t-SNE practice."""

    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch: int = 250
    early_exaggeration: float = 4.0
    exaggeration_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.perplexity <= 1:
            raise ManifoldError(f"perplexity must be > 1, got {self.perplexity}")
        if self.iterations < 1:
            raise ManifoldError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ManifoldError("learning rate must be positive")
        for a in (self.momentum_early, self.momentum_late):
            if not (0.0 <= a < 1.0):
                raise ManifoldError("momentum must lie in [0, 1)")


# ---------------------------------------------------------------------------
# Feature extraction

def _downsample_gray(img: Raster, d_side: int) -> np.ndarray:
    gray = to_grayscale(img) if img.channels == 3 else img
    # BOX filter = area averaging.
    small = Image.fromarray(gray.pixels).resize((d_side, d_side), Image.BOX)
    return np.asarray(small, dtype=np.float64).ravel() / 255.0


def extract_features(images: Sequence[Raster], d_side: int = 32) -> np.ndarray:
    """Per-run feature matrix: grayscale, area-averaged d_side x d_side
    downsample, flattened and scaled to [0, 1], centered by the run mean."""
    if d_side < 2:
        raise ManifoldError(f"d_side must be >= 2, got {d_side}")
    if not images:
        raise ManifoldError("feature extraction needs at least one image")
    X = np.stack([_downsample_gray(img, d_side) for img in images])
    return X - X.mean(axis=0)


# ---------------------------------------------------------------------------
# Affinities

def _row_entropy_bits(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def _squared_distances(X: np.ndarray) -> np.ndarray:
    sq = (X * X).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _calibrate_row(d2_row: np.ndarray, perplexity: float) -> Tuple[np.ndarray, float, bool]:
    """Binary-search the bandwidth so the row perplexity hits the target.

    Returns (row probabilities, sigma, degenerate flag); a degenerate row
    falls back to uniform over the non-self entries.
    """
    n_other = d2_row.size
    uniform = np.full(n_other, 1.0 / n_other)
    if np.all(d2_row <= 0):
        return uniform, float("inf"), True

    def row_for(beta: float) -> np.ndarray:
        w = np.exp(-d2_row * beta)
        s = w.sum()
        return w / s if s > 0 else np.zeros_like(w)

    target = perplexity
    beta, beta_lo, beta_hi = 1.0, 0.0, float("inf")
    row = row_for(beta)
    for _ in range(SIGMA_SEARCH_MAX_ITER):
        perp = 2.0 ** _row_entropy_bits(row)
        if abs(perp - target) <= PERPLEXITY_TOL:
            return row, math.sqrt(1.0 / (2.0 * beta)), False
        if perp > target:  # too flat: narrow the kernel
            beta_lo = beta
            beta = beta * 2.0 if beta_hi == float("inf") else (beta + beta_hi) / 2.0
        else:
            beta_hi = beta
            beta = (beta + beta_lo) / 2.0
        row = row_for(beta)
    perp = 2.0 ** _row_entropy_bits(row)
    if abs(perp - target) <= PERPLEXITY_TOL:
        return row, math.sqrt(1.0 / (2.0 * beta)), False
    return uniform, float("inf"), True


def conditional_affinities(X: np.ndarray, perplexity: float
                           ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gaussian conditional affinities p_{j|i} calibrated per point.

    Returns the n x n conditional matrix (zero diagonal, rows sum to 1),
    the per-point sigmas, and a boolean flag per row marking degenerate
    rows that fell back to a uniform distribution.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 3:
        raise ManifoldError(f"need at least 3 points, got {n}")
    if not (perplexity < n):
        raise ManifoldError(f"perplexity {perplexity} must be < n = {n}")
    if not np.isfinite(X).all():
        raise ManifoldError("feature vectors must be finite")
    d2 = _squared_distances(X)
    cond = np.zeros((n, n))
    sigmas = np.zeros(n)
    degenerate = np.zeros(n, dtype=bool)
    idx = np.arange(n)
    for i in range(n):
        others = idx != i
        row, sigmas[i], degenerate[i] = _calibrate_row(d2[i, others], perplexity)
        cond[i, others] = row
    return cond, sigmas, degenerate


def symmetrize(cond: np.ndarray) -> np.ndarray:
    """Joint affinities p_ij = (p_{j|i} + p_{i|j}) / 2n, floored
    off-diagonal to avoid log singularities in the cost."""
    n = cond.shape[0]
    p = (cond + cond.T) / (2.0 * n)
    off = ~np.eye(n, dtype=bool)
    p[off] = np.maximum(p[off], PROB_FLOOR)
    return p


def low_dim_affinities(Y: np.ndarray) -> np.ndarray:
    """Student-t affinities q_ij normalized over all ordered pairs."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[0] < 2:
        raise ManifoldError("need at least 2 points")
    w = 1.0 / (1.0 + _squared_distances(Y))
    np.fill_diagonal(w, 0.0)
    q = w / w.sum()
    off = ~np.eye(Y.shape[0], dtype=bool)
    q[off] = np.maximum(q[off], PROB_FLOOR)
    return q


def kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    off = ~np.eye(P.shape[0], dtype=bool)
    p = P[off]
    q = Q[off]
    return float((p * np.log(p / q)).sum())


def gradient(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Gradient of the KL cost: 4 sum_j (p - q)(y_i - y_j) w_ij."""
    Y = np.asarray(Y, dtype=np.float64)
    w = 1.0 / (1.0 + _squared_distances(Y))
    np.fill_diagonal(w, 0.0)
    q = w / w.sum()
    off = ~np.eye(Y.shape[0], dtype=bool)
    q[off] = np.maximum(q[off], PROB_FLOOR)
    coeff = (P - q) * w
    # sum_j coeff_ij (y_i - y_j) = y_i * rowsum - coeff @ Y
    return 4.0 * (Y * coeff.sum(axis=1)[:, None] - coeff @ Y)


def embed_points(X: np.ndarray, cfg: Optional[TsneConfig] = None
                 ) -> Tuple[np.ndarray, float, float]:
    """Run exact t-SNE; returns (n x 2 embedding, initial KL, final KL).

    The step moves opposite the KL gradient, with the momentum schedule
    and optional early exaggeration from the config. Bit-identical for a
    fixed seed on the same platform.
    """
    cfg = cfg or TsneConfig()
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 3:
        raise ManifoldError(f"need at least 3 points, got {n}")
    perp = min(cfg.perplexity, float(n - 1))
    cond, _, _ = conditional_affinities(X, perp)
    P = symmetrize(cond)

    rng = np.random.default_rng(cfg.seed)
    Y = rng.normal(0.0, math.sqrt(1e-4), size=(n, 2))
    kl_initial = kl_divergence(P, low_dim_affinities(Y))

    Y_prev = Y.copy()
    for t in range(1, cfg.iterations + 1):
        Pt = P * cfg.early_exaggeration if (
            cfg.early_exaggeration != 1.0 and t <= cfg.exaggeration_iters) else P
        grad = gradient(Pt, Y)
        if not np.isfinite(grad).all():
            raise ManifoldError(
                f"non-finite gradient at iteration {t}; "
                f"max |grad| = {np.abs(grad[np.isfinite(grad)]).max(initial=0.0)}")
        alpha = cfg.momentum_early if t < cfg.momentum_switch else cfg.momentum_late
        Y_next = Y - cfg.learning_rate * grad + alpha * (Y - Y_prev)
        Y_prev, Y = Y, Y_next
        Y = Y - Y.mean(axis=0)  # keep the embedding centered
    kl_final = kl_divergence(P, low_dim_affinities(Y))
    if not (np.isfinite(kl_initial) and np.isfinite(kl_final)):
        raise ManifoldError("non-finite KL cost after optimization")
    return Y, kl_initial, kl_final


def embed(X: np.ndarray, ids: Sequence[str], origins: Sequence[str],
          categories: Sequence[str], cfg: Optional[TsneConfig] = None
          ) -> Tuple[List[EmbeddingPoint], float, float]:
    """Embed a tagged feature matrix into 2-D points, order-aligned."""
    if not (len(ids) == len(origins) == len(categories) == len(X)):
        raise ManifoldError("ids, origins, categories must align with X")
    Y, kl_initial, kl_final = embed_points(X, cfg)
    points = [EmbeddingPoint(id=i, x=float(y[0]), y=float(y[1]), origin=o, category=c)
              for i, o, c, y in zip(ids, origins, categories, Y)]
    return points, kl_initial, kl_final


class ExactTSNE(BaseEstimator):
    """Exact t-SNE with a scikit-learn estimator surface.

    Parameters mirror :class:`TsneConfig`; ``fit_transform(X)`` returns
    the (n, 2) embedding and stores ``embedding_``, ``kl_initial_`` and
    ``kl_final_``.
    """

    def __init__(self, perplexity=30.0, iterations=1000, learning_rate=200.0,
                 early_exaggeration=4.0, exaggeration_iters=100,
                 momentum_early=0.5, momentum_late=0.8, momentum_switch=250,
                 random_state=0):
        self.perplexity = perplexity
        self.iterations = iterations
        self.learning_rate = learning_rate
        self.early_exaggeration = early_exaggeration
        self.exaggeration_iters = exaggeration_iters
        self.momentum_early = momentum_early
        self.momentum_late = momentum_late
        self.momentum_switch = momentum_switch
        self.random_state = random_state

    def _config(self) -> TsneConfig:
        return TsneConfig(
            perplexity=self.perplexity, iterations=self.iterations,
            learning_rate=self.learning_rate,
            momentum_early=self.momentum_early, momentum_late=self.momentum_late,
            momentum_switch=self.momentum_switch,
            early_exaggeration=self.early_exaggeration,
            exaggeration_iters=self.exaggeration_iters,
            seed=self.random_state)

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ManifoldError("X must be a 2-D array")
        self.embedding_, self.kl_initial_, self.kl_final_ = embed_points(X, self._config())
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_

"""PSNR and SSIM on normalized images (peak value 1.0)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatch, ImageTooSmall

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    ssim: float
    per_color: tuple = ()


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b) -> float:
    """``10*log10(1/MSE)``; ``inf`` when the images are identical."""
    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(1.0 / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2
    g = np.exp(-(x**2) / (2 * sigma**2))
    return g / g.sum()


def _filter_valid(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = len(g)
    rows = sliding_window_view(img, n, axis=1) @ g
    return sliding_window_view(rows, n, axis=0) @ g


def ssim_map(a, b, data_range: float = 1.0) -> np.ndarray:
    """Local SSIM over every fully-contained 11x11 Gaussian window."""
    a, b = _pair(a, b)
    if a.ndim != 2:
        raise ValueError("ssim_map expects a single plane")
    if min(a.shape) < SSIM_WINDOW:
        raise ImageTooSmall(f"SSIM needs both sides >= {SSIM_WINDOW}, got {a.shape}")
    g = gaussian_window()
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mu_a = _filter_valid(a, g)
    mu_b = _filter_valid(b, g)
    var_a = _filter_valid(a * a, g) - mu_a**2
    var_b = _filter_valid(b * b, g) - mu_b**2
    cov = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b) -> float:
    """Mean SSIM; color images (H, W, C) average the per-plane scores."""
    a, b = _pair(a, b)
    if a.ndim == 3:
        return float(np.mean([ssim(a[..., c], b[..., c]) for c in range(a.shape[2])]))
    if min(a.shape) < SSIM_WINDOW:
        raise ImageTooSmall(f"SSIM needs both sides >= {SSIM_WINDOW}, got {a.shape}")
    if np.array_equal(a, b):
        return 1.0
    return float(ssim_map(a, b).mean())


def quality(a, b) -> QualityReport:
    a, b = _pair(a, b)
    if a.ndim == 3:
        per = tuple((psnr(a[..., c], b[..., c]), ssim(a[..., c], b[..., c]))
                    for c in range(a.shape[2]))
    else:
        per = ()
    return QualityReport(psnr=psnr(a, b), ssim=ssim(a, b), per_color=per)

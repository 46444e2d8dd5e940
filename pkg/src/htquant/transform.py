"""Row-wise M-point Hadamard transform with per-channel analog gains.

The matrix is kept in its unnormalized +1/-1 form. The analog gain of channel
``j`` is ``beta_j = 2**alpha_j / M``, so channel 0 carries the segment mean and
stays inside [0, 1] for unit-range pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphaNegative, NonPowerOfTwo, OrderTooLarge, WidthTooSmall, ZeroGain

MAX_ORDER = 64

__all__ = [
    "ChannelPlanes",
    "hadamard_matrix",
    "gains_from_alphas",
    "forward_rows",
    "inverse_rows",
    "clip_width",
]


def hadamard_matrix(M: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order ``M`` with integer entries +1/-1."""
    if not isinstance(M, (int, np.integer)) or M < 1 or (M & (M - 1)) != 0:
        raise NonPowerOfTwo(f"Hadamard order must be a power of two, got {M!r}")
    if M > MAX_ORDER:
        raise OrderTooLarge(f"Hadamard order {M} exceeds {MAX_ORDER}")
    H = np.ones((1, 1), dtype=np.int64)
    while H.shape[0] < M:
        H = np.block([[H, H], [H, -H]])
    return H


def gains_from_alphas(alphas, M: int) -> np.ndarray:
    alphas = np.asarray(alphas)
    if alphas.shape != (M,):
        raise ValueError(f"expected {M} gain exponents, got {alphas.shape}")
    if np.any(alphas < 0):
        raise AlphaNegative(f"gain exponents must be >= 0, got {alphas.tolist()}")
    if alphas[0] != 0:
        raise ValueError("the DC gain exponent must be 0")
    return np.exp2(alphas.astype(np.float64)) / M


@dataclass
class ChannelPlanes:
    """Analog channel values of a row-transformed image plane.

    ``planes[j, r, s]`` is channel ``j`` of segment ``s`` in row ``r``, already
    multiplied by ``gains[j]``.
    """

    planes: np.ndarray
    gains: np.ndarray

    @property
    def M(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width_segments(self) -> int:
        return self.planes.shape[2]

    @property
    def width(self) -> int:
        return self.M * self.width_segments


def clip_width(img: np.ndarray, M: int) -> np.ndarray:
    """Drop trailing columns so the width is a multiple of ``M``."""
    if img.shape[1] < M:
        raise WidthTooSmall(f"image width {img.shape[1]} is smaller than M={M}")
    return img[:, : (img.shape[1] // M) * M]


def _segments(img: np.ndarray, M: int) -> np.ndarray:
    img = clip_width(np.asarray(img, dtype=np.float64), M)
    h, w = img.shape
    return img.reshape(h, w // M, M)


def forward_rows(img: np.ndarray, M: int, alphas=None) -> ChannelPlanes:
    """Transform every length-``M`` row segment of a 2-D plane.

    Columns beyond the largest multiple of ``M`` are dropped.
    """
    H = hadamard_matrix(M)
    if alphas is None:
        alphas = np.zeros(M, dtype=int)
    gains = gains_from_alphas(alphas, M)
    seg = _segments(img, M)
    # t[r, s, j] = sum_i H[j, i] * x[r, s, i]
    t = seg @ H.T.astype(np.float64)
    planes = np.moveaxis(t, -1, 0) * gains[:, None, None]
    return ChannelPlanes(planes=planes, gains=gains)


def inverse_rows(ch: ChannelPlanes) -> np.ndarray:
    """Undo the gains and the transform, returning the (clipped-width) plane."""
    gains = np.asarray(ch.gains, dtype=np.float64)
    if np.any(gains <= 0):
        raise ZeroGain(f"channel gains must be positive, got {gains.tolist()}")
    M = ch.M
    H = hadamard_matrix(M).astype(np.float64)
    t = np.moveaxis(ch.planes / gains[:, None, None], 0, -1)
    x = (t @ H) / M
    return x.reshape(ch.height, ch.width)

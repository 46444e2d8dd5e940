"""Per-channel spread statistics and the gain / bit allocation derived from them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BitsOutOfRange, DegenerateDC, EmptyDataset
from .transform import forward_rows

ALPHA_MAX = 6
MAX_BITS = 16

# floor(log2(r)) is taken with this slack so exact powers of two are not
# pushed down one step by rounding in the statistics.
_LOG2_SLACK = 1e-9


@dataclass(frozen=True)
class ChannelStats:
    sigma: np.ndarray
    count: int


@dataclass(frozen=True)
class GainExponents:
    alphas: tuple
    degenerate: bool = False


@dataclass(frozen=True)
class BitAllocation:
    """Full-scale resolution, gain exponents and per-channel bit widths."""

    n0: int
    alphas: tuple
    bits: tuple = field(default=None)

    def __post_init__(self):
        alphas = tuple(int(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if self.bits is None:
            bits = tuple(max(self.n0 - a, 0) for a in alphas)
        else:
            bits = tuple(int(b) for b in self.bits)
        if len(bits) != len(alphas):
            raise ValueError("bits and alphas must have the same length")
        for b in bits:
            if not 0 <= b <= MAX_BITS:
                raise BitsOutOfRange(f"channel bit width {b} outside [0, {MAX_BITS}]")
        if bits[0] == 0:
            raise BitsOutOfRange("the DC channel cannot be eliminated")
        object.__setattr__(self, "bits", bits)

    @property
    def M(self) -> int:
        return len(self.alphas)

    @property
    def gains(self) -> tuple:
        return tuple(2**a for a in self.alphas)

    @property
    def bpp(self):
        from .quantize import bpp

        return bpp(self.bits)

    @classmethod
    def from_bpc(cls, bpc, alphas=(0, 3, 2, 3)) -> "BitAllocation":
        """Build from a bits-per-channel label such as ``"8565"`` or ``"8,0,6,0"``."""
        bits = parse_bpc(bpc, len(alphas))
        return cls(n0=bits[0], alphas=tuple(alphas), bits=bits)

    def label(self) -> str:
        if all(b < 10 for b in self.bits):
            return "".join(str(b) for b in self.bits)
        return ",".join(str(b) for b in self.bits)


def parse_bpc(bpc, M: int | None = None) -> tuple:
    """Parse ``"8565"`` (single digits) or ``"8,5,6,5"`` into a tuple of ints."""
    if isinstance(bpc, str):
        text = bpc.strip()
        parts = text.split(",") if "," in text else list(text)
        try:
            bits = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"malformed bits-per-channel string {bpc!r}") from None
    else:
        bits = tuple(int(b) for b in bpc)
    if M is not None and len(bits) != M:
        raise ValueError(f"bits-per-channel {bpc!r} has {len(bits)} entries, expected {M}")
    for b in bits:
        if not 0 <= b <= MAX_BITS:
            raise BitsOutOfRange(f"channel bit width {b} outside [0, {MAX_BITS}]")
    return bits


def channel_sigma(img: np.ndarray, M: int = 4) -> ChannelStats:
    """Population standard deviation of ``t_j / M`` over every row segment.

    Color images (H, W, C) pool the segments of all color planes.
    """
    img = np.asarray(img, dtype=np.float64)
    planes = [img] if img.ndim == 2 else [img[..., c] for c in range(img.shape[2])]
    # alpha = 0 gives exactly t_j / M on every channel
    values = np.concatenate(
        [forward_rows(p, M).planes.reshape(M, -1) for p in planes], axis=1
    )
    # shifting by the first sample keeps constant channels at exactly zero
    values = values - values[:, :1]
    return ChannelStats(sigma=values.std(axis=1), count=values.shape[1])


def _alpha_from_ratio(r: float, alpha_max: int) -> int:
    a = math.floor(math.log2(r) + _LOG2_SLACK)
    return int(min(max(a, 0), alpha_max))


def alpha_from_sigmas(stats, alpha_max: int = ALPHA_MAX) -> GainExponents:
    """``alpha_j = floor(log2(sigma_0 / sigma_j))`` clamped to ``[0, alpha_max]``.

    A channel with zero spread gets ``alpha_max``. A zero DC spread gives all-zero
    exponents, flagged as degenerate.
    """
    sigma = np.asarray(getattr(stats, "sigma", stats), dtype=np.float64)
    if sigma[0] <= 0:
        warnings.warn("DC channel has zero spread; using unit gains", DegenerateDC, stacklevel=2)
        return GainExponents(alphas=(0,) * len(sigma), degenerate=True)
    alphas = [0]
    for s in sigma[1:]:
        alphas.append(alpha_max if s <= 0 else _alpha_from_ratio(sigma[0] / s, alpha_max))
    return GainExponents(alphas=tuple(alphas))


def calibrate_dataset(images, M: int = 4, n0: int = 8, alpha_max: int = ALPHA_MAX) -> BitAllocation:
    """Average the spread ratios ``sigma_0 / sigma_j`` over a set of images.

    Channels with zero spread in an image are left out of that image's
    contribution; images with zero DC spread contribute nothing.
    """
    images = list(images)
    if not images:
        raise EmptyDataset("calibration needs at least one image")
    sums = np.zeros(M)
    counts = np.zeros(M, dtype=int)
    usable = 0
    for img in images:
        sigma = channel_sigma(img, M).sigma
        if sigma[0] <= 0:
            continue
        usable += 1
        for j in range(1, M):
            if sigma[j] > 0:
                sums[j] += sigma[0] / sigma[j]
                counts[j] += 1
    if usable == 0:
        warnings.warn("DC channel has zero spread in every image; using unit gains",
                      DegenerateDC, stacklevel=2)
        return BitAllocation(n0=n0, alphas=(0,) * M)
    alphas = [0]
    for j in range(1, M):
        if counts[j] == 0:
            alphas.append(alpha_max)
        else:
            alphas.append(_alpha_from_ratio(sums[j] / counts[j], alpha_max))
    return BitAllocation(n0=n0, alphas=tuple(alphas))

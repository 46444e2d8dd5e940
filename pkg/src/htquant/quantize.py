"""Uniform quantizers for HT channels and for the baseline (LSB-drop) path.

Every quantizer here uses the same law: clip to the cell grid, map affinely
onto [0, 1), take ``floor(u * 2**N)`` (top value folded into the last cell) and
reconstruct at the cell midpoint.

The unipolar grid is exactly [0, 1]. The bipolar grid covers the declared
range [-1, 1] shifted down by half a cell, ``[-1 - 2**-N, 1 - 2**-N]``, so that
0 is a reconstruction level: code ``2**(N-1)`` decodes to exactly 0 and code 0
to exactly -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BitsOutOfRange, CodeOverflow
from .transform import ChannelPlanes

MAX_BITS = 16

UNIPOLAR = "unipolar"
BIPOLAR = "bipolar"
RANGES = {UNIPOLAR: (0.0, 1.0), BIPOLAR: (-1.0, 1.0)}


def channel_range(j: int) -> str:
    """Channel 0 (segment mean) is unipolar, the difference channels bipolar."""
    return UNIPOLAR if j == 0 else BIPOLAR


def _check_bits(bits, lo=0, hi=MAX_BITS):
    if not lo <= int(bits) <= hi:
        raise BitsOutOfRange(f"bit width {bits} outside [{lo}, {hi}]")


def code_dtype(bits: int):
    return np.uint8 if bits <= 8 else np.uint16


def cell_grid(bits: int, rng: str = UNIPOLAR) -> tuple:
    """``(lo, hi)`` of the span split into ``2**bits`` equal cells."""
    lo, hi = RANGES[rng]
    if rng == BIPOLAR:
        half = 2.0 ** -bits
        return lo - half, hi - half
    return lo, hi


def quantize_channel(values, bits: int, rng: str = UNIPOLAR) -> np.ndarray:
    _check_bits(bits)
    values = np.asarray(values, dtype=np.float64)
    if bits == 0:
        return np.empty(0, dtype=np.uint8)
    lo, hi = cell_grid(bits, rng)
    u = (np.clip(values, lo, hi) - lo) / (hi - lo)
    levels = 1 << bits
    codes = np.minimum(np.floor(u * levels), levels - 1)
    return codes.astype(code_dtype(bits))


def dequantize_channel(codes, bits: int, rng: str = UNIPOLAR, shape=None) -> np.ndarray:
    """Midpoint reconstruction. ``bits == 0`` gives zeros of ``shape``."""
    _check_bits(bits)
    if bits == 0:
        return np.zeros(shape if shape is not None else 0, dtype=np.float64)
    lo, hi = cell_grid(bits, rng)
    codes = np.asarray(codes)
    if codes.size and (codes.min() < 0 or codes.max() >= (1 << bits)):
        raise CodeOverflow(f"codes do not fit in {bits} bits")
    u = (codes.astype(np.float64) + 0.5) / (1 << bits)
    return lo + u * (hi - lo)


def baseline_quantize(img, bits: int) -> np.ndarray:
    """Quantize raw pixels in [0, 1] to ``bits`` and reconstruct, no transform."""
    _check_bits(bits, 1, 8)
    img = np.asarray(img, dtype=np.float64)
    return dequantize_channel(quantize_channel(img, bits, UNIPOLAR), bits, UNIPOLAR)


def bpp(bits) -> Fraction:
    """Average bits per pixel of a per-channel allocation (exact rational)."""
    bits = list(bits)
    if not bits:
        raise ValueError("need at least one channel")
    return Fraction(sum(int(b) for b in bits), len(bits))


@dataclass
class ChannelCodes:
    """Integer codes for the M channels of one plane; eliminated channels hold None."""

    bits: tuple
    codes: list
    height: int
    width_segments: int

    @property
    def M(self) -> int:
        return len(self.bits)

    @property
    def ranges(self) -> tuple:
        return tuple(channel_range(j) for j in range(self.M))

    @property
    def bpp(self) -> Fraction:
        return bpp(self.bits)


def quantize_planes(ch: ChannelPlanes, bits) -> ChannelCodes:
    bits = tuple(int(b) for b in bits)
    if len(bits) != ch.M:
        raise ValueError(f"expected {ch.M} bit widths, got {len(bits)}")
    codes = []
    for j, n in enumerate(bits):
        codes.append(quantize_channel(ch.planes[j], n, channel_range(j)) if n else None)
    return ChannelCodes(bits=bits, codes=codes, height=ch.height, width_segments=ch.width_segments)


def dequantize_planes(cc: ChannelCodes, gains) -> ChannelPlanes:
    shape = (cc.height, cc.width_segments)
    planes = np.stack([
        dequantize_channel(c, n, channel_range(j), shape=shape).reshape(shape)
        for j, (c, n) in enumerate(zip(cc.codes, cc.bits))
    ])
    return ChannelPlanes(planes=planes, gains=np.asarray(gains, dtype=np.float64))


def reconstruction_error_bound(bits, gains) -> float:
    """Worst-case per-pixel error of a transform-quantize-inverse round trip.

    ``gains`` are the relative channel gains ``2**alpha_j``. Valid when no
    channel value falls outside its cell grid and no channel is eliminated.
    Each channel's half-cell error reaches every pixel with weight
    ``1 / gain_j``, so the bound is ``sum_j halfcell_j / gain_j``.
    """
    total = 0.0
    for j, (n, g) in enumerate(zip(bits, gains)):
        lo, hi = RANGES[channel_range(j)]
        total += (hi - lo) / 2.0 ** (n + 1) / g
    return total

"""Encode/decode pipeline and the ``.htq`` container.

The byte layout is documented in FORMAT.md at the repository root.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .calibrate import BitAllocation
from .errors import BadMagic, FormatError, HeaderFieldOutOfRange, TruncatedPayload
from .quantize import (
    ChannelCodes,
    baseline_quantize,
    code_dtype,
    dequantize_planes,
    quantize_planes,
)
from .transform import MAX_ORDER, forward_rows, gains_from_alphas, inverse_rows

MAGIC = b"HTQ1"
VERSION = 1
_FIXED = struct.Struct("<4sHIIBBB")
_LENGTH = struct.Struct("<Q")
MAX_COLORS = 4
MAX_ALPHA = 16


@dataclass(frozen=True)
class CodedImage:
    width: int
    height: int
    color_channels: int
    M: int
    n0: int
    bits: tuple
    alphas: tuple
    payload: bytes

    @property
    def allocation(self) -> BitAllocation:
        return BitAllocation(n0=self.n0, alphas=self.alphas, bits=self.bits)

    @property
    def width_segments(self) -> int:
        return self.width // self.M

    @property
    def bpp(self):
        return self.allocation.bpp

    def header_size(self) -> int:
        return _FIXED.size + 2 * self.M + _LENGTH.size

    def to_bytes(self) -> bytes:
        return serialize(self)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CodedImage":
        return parse(data)


def channel_payload_bytes(height: int, width_segments: int, bits: int) -> int:
    """Bytes used by one HT channel of one color plane, including padding."""
    return (height * width_segments * bits + 7) // 8


def payload_size(height: int, width: int, M: int, bits, color_channels: int = 1) -> int:
    ws = width // M
    return color_channels * sum(channel_payload_bytes(height, ws, n) for n in bits if n)


# -- bit packing ------------------------------------------------------------

def pack_codes(codes, bits: int) -> bytes:
    """Concatenate ``bits``-wide codes MSB-first and zero-pad to a byte boundary."""
    codes = np.asarray(codes, dtype=np.uint32).ravel()
    shifts = np.arange(bits - 1, -1, -1, dtype=np.uint32)
    bitmat = ((codes[:, None] >> shifts) & 1).astype(np.uint8)
    return np.packbits(bitmat.ravel()).tobytes()


def unpack_codes(buf: bytes, bits: int, count: int) -> np.ndarray:
    raw = np.unpackbits(np.frombuffer(buf, dtype=np.uint8))[: count * bits]
    if raw.size < count * bits:
        raise TruncatedPayload(f"need {count * bits} bits, have {raw.size}")
    weights = (1 << np.arange(bits - 1, -1, -1)).astype(np.uint32)
    codes = raw.reshape(count, bits).astype(np.uint32) @ weights
    return codes.astype(code_dtype(bits))


# -- container --------------------------------------------------------------

def serialize(coded: CodedImage) -> bytes:
    head = _FIXED.pack(MAGIC, VERSION, coded.width, coded.height,
                       coded.color_channels, coded.M, coded.n0)
    head += bytes(coded.bits) + bytes(coded.alphas)
    head += _LENGTH.pack(len(coded.payload))
    return head + coded.payload


def _check(cond, msg):
    if not cond:
        raise HeaderFieldOutOfRange(msg)


def parse(data: bytes) -> CodedImage:
    data = bytes(data)
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"not an HTQ1 stream (starts with {data[:4]!r})")
    if len(data) < _FIXED.size:
        raise TruncatedPayload("header is truncated")
    _, version, width, height, colors, M, n0 = _FIXED.unpack_from(data)
    _check(version == VERSION, f"unsupported version {version}")
    _check(1 <= M <= MAX_ORDER and M & (M - 1) == 0, f"invalid transform order {M}")
    _check(1 <= colors <= MAX_COLORS, f"invalid color channel count {colors}")
    _check(width >= M, f"width {width} smaller than M={M}")
    _check(height >= 1, "height must be positive")
    _check(1 <= n0 <= 16, f"invalid N0 {n0}")
    off = _FIXED.size
    if len(data) < off + 2 * M + _LENGTH.size:
        raise TruncatedPayload("header is truncated")
    bits = tuple(data[off: off + M])
    alphas = tuple(data[off + M: off + 2 * M])
    (length,) = _LENGTH.unpack_from(data, off + 2 * M)
    _check(all(b <= 16 for b in bits) and bits[0] >= 1, f"invalid channel bit widths {bits}")
    _check(alphas[0] == 0 and all(a <= MAX_ALPHA for a in alphas), f"invalid gain exponents {alphas}")
    expected = payload_size(height, width, M, bits, colors)
    _check(length == expected, f"declared payload {length} bytes, layout needs {expected}")
    start = off + 2 * M + _LENGTH.size
    payload = data[start:]
    if len(payload) < length:
        raise TruncatedPayload(f"payload has {len(payload)} of {length} bytes")
    if len(payload) > length:
        raise FormatError(f"{len(payload) - length} trailing bytes after payload")
    return CodedImage(width=width, height=height, color_channels=colors, M=M, n0=n0,
                      bits=bits, alphas=alphas, payload=payload)


# -- pipeline ---------------------------------------------------------------

def _planes_of(img: np.ndarray) -> list:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return [img]
    if img.ndim == 3:
        return [img[..., c] for c in range(img.shape[2])]
    raise ValueError(f"expected a 2-D or 3-D image array, got shape {img.shape}")


def pack_plane(cc: ChannelCodes) -> bytes:
    return b"".join(pack_codes(c, n) for c, n in zip(cc.codes, cc.bits) if n)


def assemble(codes_per_plane, width: int, cfg: BitAllocation) -> CodedImage:
    first = codes_per_plane[0]
    return CodedImage(
        width=int(width), height=first.height, color_channels=len(codes_per_plane),
        M=cfg.M, n0=cfg.n0, bits=tuple(cfg.bits), alphas=tuple(cfg.alphas),
        payload=b"".join(pack_plane(cc) for cc in codes_per_plane),
    )


def encode(img: np.ndarray, cfg: BitAllocation) -> CodedImage:
    """Transform, quantize and pack each color plane."""
    planes = _planes_of(img)
    codes = [quantize_planes(forward_rows(p, cfg.M, cfg.alphas), cfg.bits) for p in planes]
    return assemble(codes, planes[0].shape[1], cfg)


def unpack_planes(coded: CodedImage) -> list:
    """Split the payload back into one ``ChannelCodes`` per color plane."""
    ws = coded.width_segments
    count = coded.height * ws
    out = []
    off = 0
    buf = coded.payload
    for _ in range(coded.color_channels):
        codes = []
        for n in coded.bits:
            if not n:
                codes.append(None)
                continue
            size = channel_payload_bytes(coded.height, ws, n)
            chunk = buf[off: off + size]
            if len(chunk) < size:
                raise TruncatedPayload("payload ends inside a channel")
            codes.append(unpack_codes(chunk, n, count).reshape(coded.height, ws))
            off += size
        out.append(ChannelCodes(bits=tuple(coded.bits), codes=codes,
                                height=coded.height, width_segments=ws))
    return out


def decode(coded: CodedImage) -> np.ndarray:
    """Reconstruct pixels in [0, 1]; shape (H, M*floor(W/M)) or (H, W', C)."""
    gains = gains_from_alphas(coded.alphas, coded.M)
    planes = []
    for cc in unpack_planes(coded):
        x = inverse_rows(dequantize_planes(cc, gains))
        planes.append(np.clip(x, 0.0, 1.0))
    if coded.color_channels == 1:
        return planes[0]
    return np.stack(planes, axis=-1)


def transcode_baseline(img: np.ndarray, bits: int) -> np.ndarray:
    """Baseline quantization applied plane-wise; same contract as ``baseline_quantize``."""
    return baseline_quantize(img, bits)


def roundtrip(img: np.ndarray, cfg: BitAllocation) -> np.ndarray:
    return decode(encode(img, cfg))

"""Image loading/saving and bilinear resizing.

Binary PGM/PPM (8-bit) are handled here directly; PNG and other formats go
through Pillow. Loaded images are float64 arrays in [0, 1], shaped (H, W) for
gray and (H, W, 3) for color.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import FormatError


class ImageFormatError(FormatError):
    pass


_PNM_HEADER = re.compile(rb"\A(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)"
                         rb"\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def read_pnm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = _PNM_HEADER.match(data)
    if not m:
        raise ImageFormatError(f"{path}: not a binary PGM/PPM file")
    kind, w, h, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    if maxval != 255:
        raise ImageFormatError(f"{path}: only 8-bit PNM is supported (maxval {maxval})")
    chans = 1 if kind == b"P5" else 3
    raw = np.frombuffer(data, dtype=np.uint8, offset=m.end())
    if raw.size < w * h * chans:
        raise ImageFormatError(f"{path}: pixel data truncated")
    raw = raw[: w * h * chans]
    shape = (h, w) if chans == 1 else (h, w, 3)
    return raw.reshape(shape).astype(np.float64) / 255.0


def to_uint8(img) -> np.ndarray:
    return np.round(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pnm(path, img) -> None:
    px = to_uint8(img)
    if px.ndim == 2:
        head = b"P5\n%d %d\n255\n" % (px.shape[1], px.shape[0])
    elif px.ndim == 3 and px.shape[2] == 3:
        head = b"P6\n%d %d\n255\n" % (px.shape[1], px.shape[0])
    else:
        raise ImageFormatError(f"cannot write shape {px.shape} as PNM")
    Path(path).write_bytes(head + px.tobytes())


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".ppm", ".pnm"):
        return read_pnm(path)
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            gray = im.mode in ("1", "L", "LA", "I", "I;16", "F")
            arr = np.asarray(im.convert("L" if gray else "RGB"))
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: unsupported image format") from exc
    return arr.astype(np.float64) / 255.0


def write_image(path, img) -> None:
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".ppm", ".pnm"):
        write_pnm(path, img)
        return
    from PIL import Image

    Image.fromarray(to_uint8(img)).save(path)


def to_gray(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img
    return img[..., :3] @ np.array([0.299, 0.587, 0.114])


def resize_bilinear(img, height: int, width: int | None = None) -> np.ndarray:
    """Bilinear resize with corner-aligned sampling.

    Output pixel ``i`` samples source coordinate ``i * (n_in - 1) / (n_out - 1)``
    and blends its four nearest neighbours.
    """
    img = np.asarray(img, dtype=np.float64)
    width = height if width is None else width
    if height < 1 or width < 1:
        raise ValueError("target size must be positive")

    def coords(n_in, n_out):
        if n_out == 1 or n_in == 1:
            pos = np.zeros(n_out)
        else:
            pos = np.arange(n_out) * ((n_in - 1) / (n_out - 1))
        i0 = np.clip(np.floor(pos).astype(int), 0, n_in - 1)
        i1 = np.minimum(i0 + 1, n_in - 1)
        return i0, i1, pos - i0

    r0, r1, fr = coords(img.shape[0], height)
    c0, c1, fc = coords(img.shape[1], width)
    extra = (None,) * (img.ndim - 2)
    fr = fr[(slice(None), None) + extra]
    fc = fc[(None, slice(None)) + extra]
    top = img[r0][:, c0] * (1 - fc) + img[r0][:, c1] * fc
    bot = img[r1][:, c0] * (1 - fc) + img[r1][:, c1] * fc
    return top * (1 - fr) + bot * fr

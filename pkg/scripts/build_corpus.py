"""Regenerate the bundled 512x512 grayscale test corpus from scikit-image's sample data.

Run from the repository root:  python scripts/build_corpus.py
"""

from pathlib import Path

import numpy as np
import skimage.data as data

from htquant.imageio import resize_bilinear, to_gray, write_image

SIZE = 512
OUT = Path(__file__).resolve().parents[1] / "src" / "htquant" / "corpus"

SOURCES = {
    "astronaut": lambda: data.astronaut(),
    "camera": lambda: data.camera(),
    "coffee": lambda: data.coffee(),
    "chelsea": lambda: data.chelsea(),
    "rocket": lambda: data.rocket(),
    "moon": lambda: data.moon(),
    "immunohistochemistry": lambda: data.immunohistochemistry(),
    "hubble_deep_field": lambda: data.hubble_deep_field(),
    "retina": lambda: data.retina(),
    "coins": lambda: data.coins(),
    "motorcycle": lambda: data.stereo_motorcycle()[0],
    "brick": lambda: data.brick(),
}


def square(img):
    h, w = img.shape[:2]
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    return img[top: top + s, left: left + s]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, load in SOURCES.items():
        img = to_gray(np.asarray(load(), dtype=np.float64) / 255.0)
        img = square(img)
        if img.shape[0] != SIZE:
            img = resize_bilinear(img, SIZE)
        write_image(OUT / f"{name}.png", img)
        print(name, img.shape)


if __name__ == "__main__":
    main()

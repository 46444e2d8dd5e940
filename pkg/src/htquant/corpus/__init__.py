"""Bundled 512x512 grayscale photographs used by the acceptance runs.

Regenerated by ``scripts/build_corpus.py`` from scikit-image's sample images;
see SOURCES.txt for provenance.
"""

from importlib import resources

from ..imageio import read_image


def corpus_paths() -> list:
    root = resources.files(__name__)
    return sorted((p for p in root.iterdir() if p.name.endswith(".png")), key=lambda p: p.name)


def load_corpus() -> dict:
    """``{name: float image in [0, 1]}`` in sorted name order."""
    return {p.name[:-4]: read_image(p) for p in corpus_paths()}

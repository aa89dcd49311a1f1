"""Integer quantization of [0, Q] images and the level-set partition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .tfr import TFR


@dataclass
class QuantizedSpectrogram:
    levels: np.ndarray  # uint16, entries in 0..Q
    Q: int
    source: TFR | None = None

    @property
    def shape(self):
        return self.levels.shape


@dataclass
class LevelIndex:
    """Pixels grouped by level.

    ``order`` lists flat pixel indices sorted by level; pixels of level ``k``
    occupy ``order[starts[k]:starts[k] + counts[k]]``.
    """

    shape: tuple
    flat_levels: np.ndarray
    order: np.ndarray
    counts: np.ndarray
    starts: np.ndarray

    @property
    def Q(self) -> int:
        return self.counts.size - 1

    def members(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """(row, col) coordinates of the pixels in level ``k``."""
        s = self.starts[k]
        return np.unravel_index(self.order[s : s + self.counts[k]], self.shape)

    def level_sums(self, values: np.ndarray) -> np.ndarray:
        """Per-level sums of an image: sum of ``values[y]`` over ``y`` in level ``k``."""
        return np.bincount(self.flat_levels, weights=np.ravel(values), minlength=self.counts.size)


def quantize(image, Q: int = 255) -> QuantizedSpectrogram:
    """Nearest-level rounding, ``S in [k - 1/2, k + 1/2)`` gives ``k``; ``[Q - 1/2, Q]`` gives Q."""
    src = image if isinstance(image, TFR) else None
    v = np.asarray(image.values if src is not None else image, dtype=float)
    if src is not None and src.kind != "image":
        raise InvalidArgumentError(f"quantize expects an image TFR, got {src.kind}")
    if not np.all(np.isfinite(v)) or v.min() < 0 or v.max() > Q:
        raise InvalidArgumentError(f"image values must lie in [0, {Q}]")
    levels = np.minimum(np.floor(v + 0.5), Q).astype(np.uint16)
    return QuantizedSpectrogram(levels, int(Q), src)


def build_level_index(qs: QuantizedSpectrogram) -> LevelIndex:
    flat = qs.levels.ravel()
    counts = np.bincount(flat, minlength=qs.Q + 1)
    # stable sort on uint16 is a radix sort, linear in the pixel count
    order = np.argsort(flat, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return LevelIndex(qs.levels.shape, flat.astype(np.intp), order, counts, starts)


def counts_csv(index: LevelIndex) -> str:
    lines = ["level,count"] + [f"{k},{c}" for k, c in enumerate(index.counts)]
    return "\n".join(lines) + "\n"

"""Grayscale preprocessing and block search.

Pixel arrays are ``(height, width)`` integer arrays; a block at ``(x, y)`` with
size ``n`` covers columns ``[x, x+n)`` and rows ``[y, y+n)``. Every rounding
step rounds half up.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArgumentError, BoundsError, FormatError, SearchError, ShapeError
from .encoding import BlockVector


@dataclass
class GrayImage:
    pixels: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.int64)
        if self.pixels.ndim != 2:
            raise ShapeError(f"expected a 2-D pixel array, got shape {self.pixels.shape}")
        if self.bit_depth not in (4, 8):
            raise ArgumentError(f"bit depth must be 4 or 8, got {self.bit_depth}")
        top = (1 << self.bit_depth) - 1
        if self.pixels.size and (self.pixels.min() < 0 or self.pixels.max() > top):
            raise ArgumentError(f"pixel values outside [0, {top}]")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class MatchResult:
    offset_x: int
    offset_y: int
    distance: float
    evaluations: int


@dataclass(frozen=True)
class BlockRef:
    """Reference block: ``n x n`` pixels of ``image`` with top-left corner ``(x, y)``."""

    image: GrayImage
    x: int
    y: int
    n: int

    def vector(self) -> np.ndarray:
        return extract_block(self.image, self.x, self.y, self.n).values


DistanceFn = Callable[[np.ndarray, np.ndarray], float]


# ---------------------------------------------------------------------------
# PGM I/O

_TOKEN = re.compile(rb"#[^\n]*\n?|\s+|[^\s#]+")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        m = _TOKEN.match(data, pos)
        if m is None:
            raise FormatError("truncated PGM header")
        tok = m.group()
        pos = m.end()
        if tok.startswith(b"#") or tok.isspace():
            continue
        tokens.append(tok)
    return tokens, pos


def parse_pgm(data: bytes) -> GrayImage:
    if data[:2] not in (b"P2", b"P5"):
        raise FormatError("not a P2/P5 PGM file")
    try:
        tokens, pos = _header_tokens(data, 4)
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise FormatError("non-numeric PGM header field") from None
    if width < 1 or height < 1:
        raise FormatError(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"only maxval 255 is supported, got {maxval}")
    count = width * height
    if tokens[0] == b"P5":
        body = data[pos + 1:pos + 1 + count]  # exactly one whitespace byte after maxval
        if len(body) < count:
            raise FormatError(f"PGM data truncated: {len(body)} of {count} bytes")
        pixels = np.frombuffer(body, dtype=np.uint8)
    else:
        fields = data[pos:].split()
        if len(fields) < count:
            raise FormatError(f"PGM data truncated: {len(fields)} of {count} values")
        try:
            pixels = np.array([int(f) for f in fields[:count]])
        except ValueError:
            raise FormatError("non-numeric PGM pixel value") from None
        if pixels.min() < 0 or pixels.max() > 255:
            raise FormatError("PGM pixel value outside [0, 255]")
    return GrayImage(pixels.reshape(height, width).astype(np.int64), 8)


def load_pgm(path) -> GrayImage:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_pgm(data)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def pgm_bytes(image: GrayImage, binary: bool = True) -> bytes:
    """Serialize with maxval 255; 4-bit images keep their raw 0-15 values."""
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n255\n".encode()
    if binary:
        return header + image.pixels.astype(np.uint8).tobytes()
    rows = "\n".join(" ".join(str(v) for v in row) for row in image.pixels)
    return header + rows.encode() + b"\n"


def save_pgm(image: GrayImage, path, binary: bool = True) -> None:
    with open(os.fspath(path), "wb") as fh:
        fh.write(pgm_bytes(image, binary))


# ---------------------------------------------------------------------------
# preprocessing


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5).astype(np.int64)


def add_gaussian_noise(image: GrayImage, mu: float = 0.0, sigma: float = 20.0,
                       seed: int = 0) -> GrayImage:
    """Additive Gaussian noise; ``sigma`` is the standard deviation."""
    if sigma < 0:
        raise ArgumentError(f"sigma must be >= 0, got {sigma}")
    if image.bit_depth != 8:
        raise ArgumentError("noise is added to 8-bit images")
    if sigma == 0 and mu == 0:
        return GrayImage(image.pixels.copy(), 8)
    rng = np.random.default_rng(seed)
    noisy = image.pixels + rng.normal(mu, sigma, image.pixels.shape)
    return GrayImage(np.clip(_round_half_up(noisy), 0, 255), 8)


def downsample(image: GrayImage, factor: int) -> GrayImage:
    """Rounded mean over ``factor x factor`` tiles."""
    if factor < 1:
        raise ArgumentError(f"factor must be >= 1, got {factor}")
    h, w = image.pixels.shape
    if h % factor or w % factor:
        raise ShapeError(f"{w}x{h} image is not divisible by {factor}")
    tiles = image.pixels.reshape(h // factor, factor, w // factor, factor).sum(axis=(1, 3))
    area = factor * factor
    return GrayImage((2 * tiles + area) // (2 * area), image.bit_depth)


def reduce_bit_depth(image: GrayImage) -> GrayImage:
    if image.bit_depth != 8:
        raise ArgumentError("image is already 4-bit")
    return GrayImage(image.pixels // 16, 4)


_KERNEL = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]], dtype=np.int64)


def gaussian_smooth(image: GrayImage) -> GrayImage:
    """3x3 binomial blur with replicated edges."""
    padded = np.pad(image.pixels, 1, mode="edge")
    h, w = image.pixels.shape
    acc = np.zeros((h, w), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            acc += _KERNEL[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return GrayImage((acc + 8) // 16, image.bit_depth)


def preprocess(image: GrayImage, sigma: float = 20.0, seed: int = 0, factor: int = 8,
               smooth: bool = False) -> GrayImage:
    """Noise, size reduction, 8 -> 4 bit, optional smoothing."""
    out = add_gaussian_noise(image, 0.0, sigma, seed)
    out = downsample(out, factor)
    out = reduce_bit_depth(out)
    return gaussian_smooth(out) if smooth else out


# ---------------------------------------------------------------------------
# blocks and search


def extract_block(image: GrayImage, x: int, y: int, n: int) -> BlockVector:
    if n < 1:
        raise ArgumentError(f"block size must be >= 1, got {n}")
    if x < 0 or y < 0 or x + n > image.width or y + n > image.height:
        raise BoundsError(
            f"{n}x{n} block at ({x}, {y}) leaves the {image.width}x{image.height} image")
    return BlockVector.from_values(image.pixels[y:y + n, x:x + n])


def classical_euclidean_distance(v1, v2) -> float:
    a = np.asarray(v1, dtype=np.int64).ravel()
    b = np.asarray(v2, dtype=np.int64).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"vector lengths differ: {a.size} vs {b.size}")
    d = a - b
    return math.sqrt(int(np.dot(d, d)))


def _window(ref_x, ref_y, n, target: GrayImage, offsets_x, offsets_y):
    for oy in offsets_y:
        for ox in offsets_x:
            x, y = ref_x + ox, ref_y + oy
            if 0 <= x and 0 <= y and x + n <= target.width and y + n <= target.height:
                yield ox, oy


def _scan(ref_vec, ref_x, ref_y, n, target, offsets_x, offsets_y, distance_fn):
    best = None
    evaluations = 0
    for ox, oy in _window(ref_x, ref_y, n, target, offsets_x, offsets_y):
        x, y = ref_x + ox, ref_y + oy
        d = float(distance_fn(ref_vec, target.pixels[y:y + n, x:x + n].ravel()))
        evaluations += 1
        if best is None or d < best[2]:
            best = (ox, oy, d)
    if best is None:
        raise SearchError("no candidate block fits inside the target image")
    return MatchResult(best[0], best[1], best[2], evaluations)


def full_search(ref: BlockRef, target: GrayImage, K: int,
                distance_fn: DistanceFn = classical_euclidean_distance) -> MatchResult:
    """Exhaustive scan of offsets in ``[-K, K]^2``; ties keep raster order (row, then column)."""
    if K < 0:
        raise ArgumentError(f"K must be >= 0, got {K}")
    offsets = range(-K, K + 1)
    return _scan(ref.vector(), ref.x, ref.y, ref.n, target, offsets, offsets, distance_fn)


def _halve_block(block: np.ndarray) -> np.ndarray:
    n = block.shape[0]
    tiles = block.reshape(n // 2, 2, n // 2, 2).sum(axis=(1, 3))
    return (2 * tiles + 4) // 8


def hierarchical_search(ref: BlockRef, target: GrayImage, K: int,
                        distance_fn: DistanceFn = classical_euclidean_distance) -> MatchResult:
    """Two-level search: half resolution over ``+-ceil(K/2)``, then ``+-1`` around the upscaled winner."""
    if ref.n % 2:
        raise ArgumentError(f"hierarchical search needs an even block size, got {ref.n}")
    if K < 1:
        raise ArgumentError(f"K must be >= 1, got {K}")
    block = ref.image.pixels[ref.y:ref.y + ref.n, ref.x:ref.x + ref.n]
    if block.shape != (ref.n, ref.n):
        raise BoundsError("reference block leaves its image")
    h, w = target.pixels.shape
    coarse_target = downsample(GrayImage(target.pixels[: h - h % 2, : w - w % 2],
                                         target.bit_depth), 2)
    coarse_k = math.ceil(K / 2)
    offsets = range(-coarse_k, coarse_k + 1)
    coarse = _scan(_halve_block(block).ravel(), ref.x // 2, ref.y // 2, ref.n // 2,
                   coarse_target, offsets, offsets, distance_fn)

    cx, cy = 2 * coarse.offset_x, 2 * coarse.offset_y
    fine_x = [o for o in range(cx - 1, cx + 2) if -K <= o <= K]
    fine_y = [o for o in range(cy - 1, cy + 2) if -K <= o <= K]
    fine = _scan(block.ravel(), ref.x, ref.y, ref.n, target, fine_x, fine_y, distance_fn)
    return MatchResult(fine.offset_x, fine.offset_y, fine.distance,
                       coarse.evaluations + fine.evaluations)

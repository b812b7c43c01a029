"""
Block matching on a downsampled image
=====================================

A 512x512 image is contaminated, shrunk to 64x64 and reduced to 4 bits.  An
8x8 block is then found in a shifted copy by full and hierarchical search.
"""

import numpy as np

from qblockmatch import BlockRef, GrayImage, full_search, hierarchical_search, preprocess
from qblockmatch.experiments import ExperimentConfig, make_distance

# 16x16 tiles: after downsampling, neighbouring pixels are correlated, which
# the half-resolution level of the hierarchical search relies on
rng = np.random.default_rng(0)
tiles = rng.integers(0, 256, size=(32, 32))
image = GrayImage(np.kron(tiles, np.ones((16, 16), dtype=int)), 8)
moved = GrayImage(np.roll(image.pixels, (-16, 24), axis=(0, 1)), 8)   # 3 right, 2 up

ref = preprocess(image, sigma=20, seed=1)
tgt = preprocess(moved, sigma=20, seed=2)
print(ref.pixels.shape, ref.pixels.min(), ref.pixels.max())

block = BlockRef(ref, 28, 28, 8)
for search in (full_search, hierarchical_search):
    r = search(block, tgt, 10)
    print(f"{search.__name__:20s} offset ({r.offset_x}, {r.offset_y})  "
          f"distance {r.distance:.3f}  evaluations {r.evaluations}")

# %%
# The same search with quantum distance estimates.  2x2 blocks keep the
# circuits small: every candidate costs one swap test or four subtractions.
# Swap-test estimates are loose near zero distance, so that backend can
# settle on a neighbouring offset.

small = BlockRef(ref, 31, 31, 2)   # straddles a tile corner
for backend in ("classical", "swap", "qft"):
    dist = make_distance(ExperimentConfig(distance=backend, shots=2000, runs=5))
    r = full_search(small, tgt, 4, dist)
    print(f"{backend:9s} offset ({r.offset_x}, {r.offset_y})  distance {r.distance:.3f}")

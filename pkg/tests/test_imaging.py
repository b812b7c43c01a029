import numpy as np
import pytest

from qblockmatch.errors import ArgumentError, BoundsError, FormatError, ShapeError
from qblockmatch.imaging import (
    BlockRef,
    GrayImage,
    add_gaussian_noise,
    classical_euclidean_distance,
    downsample,
    extract_block,
    full_search,
    gaussian_smooth,
    hierarchical_search,
    load_pgm,
    parse_pgm,
    pgm_bytes,
    preprocess,
    reduce_bit_depth,
    save_pgm,
)


def textured(size, seed=0, depth=4):
    rng = np.random.default_rng(seed)
    return GrayImage(rng.integers(0, 1 << depth, size=(size, size)), depth)


def shifted(image, ox, oy):
    """Target in which the content at (x, y) of ``image`` appears at (x+ox, y+oy)."""
    return GrayImage(np.roll(image.pixels, (oy, ox), axis=(0, 1)), image.bit_depth)


class TestPGM:
    @pytest.mark.parametrize("binary", [True, False])
    def test_round_trip(self, tmp_path, binary):
        img = textured(9, seed=1, depth=8)
        path = tmp_path / "x.pgm"
        save_pgm(img, path, binary=binary)
        back = load_pgm(path)
        assert np.array_equal(back.pixels, img.pixels)

    def test_binary_header(self):
        data = pgm_bytes(GrayImage([[0, 255], [7, 9]], 8))
        assert data == b"P5\n2 2\n255\n" + bytes([0, 255, 7, 9])

    def test_four_bit_values_written_raw(self):
        data = pgm_bytes(GrayImage([[15, 0]], 4), binary=False)
        assert data.endswith(b"15 0\n")
        assert b"255" in data.splitlines()[2]

    def test_comments_in_header(self):
        img = parse_pgm(b"P2\n# made by hand\n2 1\n# max\n255\n3 4\n")
        assert img.pixels.tolist() == [[3, 4]]

    def test_maxval_must_be_255(self):
        with pytest.raises(FormatError):
            parse_pgm(b"P5\n1 1\n65535\n\x00\x00")

    def test_truncated_binary(self):
        with pytest.raises(FormatError, match="truncated"):
            parse_pgm(b"P5\n4 4\n255\n" + bytes(10))

    def test_truncated_ascii(self):
        with pytest.raises(FormatError):
            parse_pgm(b"P2\n2 2\n255\n1 2 3\n")

    def test_wrong_magic(self):
        with pytest.raises(FormatError):
            parse_pgm(b"P6\n1 1\n255\n\x00\x00\x00")

    def test_missing_file_names_path(self, tmp_path):
        with pytest.raises(FormatError, match="nope.pgm"):
            load_pgm(tmp_path / "nope.pgm")


class TestNoise:
    def test_zero_sigma_identity(self):
        img = textured(16, depth=8)
        assert np.array_equal(add_gaussian_noise(img, 0, 0, seed=3).pixels, img.pixels)

    def test_mean_preserved(self):
        img = GrayImage(np.full((128, 128), 128), 8)
        out = add_gaussian_noise(img, 0, 20, seed=0)
        # 5 sigma bound on the sample mean, plus half a grey level for rounding
        assert abs(out.pixels.mean() - 128) <= 5 * 20 / 128 + 0.5

    def test_clamped(self):
        img = GrayImage(np.array([[0, 255] * 50]), 8)
        out = add_gaussian_noise(img, 0, 100, seed=1)
        assert out.pixels.min() >= 0 and out.pixels.max() <= 255

    def test_seeded(self):
        img = textured(16, depth=8)
        a = add_gaussian_noise(img, 0, 20, seed=5).pixels
        b = add_gaussian_noise(img, 0, 20, seed=5).pixels
        assert np.array_equal(a, b)


class TestDownsample:
    def test_rounds_half_up(self):
        assert downsample(GrayImage([[0, 1], [0, 1]], 8), 2).pixels.tolist() == [[1]]

    def test_tile_mean(self):
        img = GrayImage(np.full((8, 8), 128), 8)
        assert downsample(img, 8).pixels.tolist() == [[128]]

    def test_shape(self):
        img = GrayImage(np.zeros((512, 512), dtype=int), 8)
        assert downsample(img, 8).pixels.shape == (64, 64)

    def test_not_divisible(self):
        with pytest.raises(ShapeError):
            downsample(GrayImage(np.zeros((10, 10), dtype=int), 8), 3)


class TestBitDepth:
    @pytest.mark.parametrize("v, want", [(255, 15), (15, 0), (144, 9), (16, 1)])
    def test_values(self, v, want):
        assert reduce_bit_depth(GrayImage([[v]], 8)).pixels[0, 0] == want

    def test_already_reduced(self):
        with pytest.raises(ArgumentError):
            reduce_bit_depth(GrayImage([[3]], 4))


class TestSmooth:
    def test_impulse(self):
        px = np.zeros((5, 5), dtype=int)
        px[2, 2] = 16
        out = gaussian_smooth(GrayImage(px, 8)).pixels
        assert out[2, 2] == 4
        assert out[2, 1] == out[1, 2] == 2
        assert out[1, 1] == 1
        assert out.sum() == 16

    def test_constant_unchanged(self):
        img = GrayImage(np.full((6, 7), 9), 4)
        assert np.array_equal(gaussian_smooth(img).pixels, img.pixels)


class TestBlocks:
    def test_extract(self):
        img = GrayImage(np.arange(16).reshape(4, 4), 4)
        assert extract_block(img, 1, 2, 2).values.tolist() == [9, 10, 13, 14]

    @pytest.mark.parametrize("x, y", [(3, 0), (-1, 0), (0, 3)])
    def test_out_of_bounds(self, x, y):
        with pytest.raises(BoundsError):
            extract_block(GrayImage(np.zeros((4, 4), dtype=int), 4), x, y, 2)

    @pytest.mark.parametrize("a, b, d", [([9, 9, 9, 9], [9, 9, 8, 9], 1.0),
                                         ([0, 0], [3, 4], 5.0),
                                         ([15] * 4, [0] * 4, 30.0)])
    def test_ced(self, a, b, d):
        assert classical_euclidean_distance(a, b) == d

    def test_ced_shape(self):
        with pytest.raises(ShapeError):
            classical_euclidean_distance([1, 2], [1, 2, 3])


class TestFullSearch:
    def test_zero_radius(self):
        img = textured(32)
        res = full_search(BlockRef(img, 10, 10, 8), img, 0)
        assert (res.offset_x, res.offset_y, res.distance, res.evaluations) == (0, 0, 0.0, 1)

    def test_planted_offset(self):
        img = textured(40, seed=2)
        res = full_search(BlockRef(img, 16, 16, 8), shifted(img, 3, -2), 10)
        assert (res.offset_x, res.offset_y, res.distance) == (3, -2, 0.0)
        assert res.evaluations == 21 * 21

    def test_window_clipped_at_border(self):
        img = textured(16)
        assert full_search(BlockRef(img, 0, 0, 8), img, 2).evaluations == 9

    def test_ties_keep_raster_order(self):
        img = GrayImage(np.full((20, 20), 5), 4)
        res = full_search(BlockRef(img, 6, 6, 4), img, 2)
        assert (res.offset_x, res.offset_y) == (-2, -2)

    def test_global_minimum(self):
        img = textured(30, seed=4)
        tgt = textured(30, seed=5)
        ref = BlockRef(img, 11, 11, 8)
        res = full_search(ref, tgt, 5)
        best = min(classical_euclidean_distance(ref.vector(),
                                                tgt.pixels[11 + oy:19 + oy, 11 + ox:19 + ox])
                   for oy in range(-5, 6) for ox in range(-5, 6))
        assert res.distance == best

    def test_recovers_shift_under_noise(self):
        hits = 0
        for seed in range(50):
            rng = np.random.default_rng(seed)
            base = GrayImage(rng.integers(0, 256, size=(64, 64)), 8)
            ox, oy = (int(v) for v in rng.integers(-8, 9, size=2))
            ref = gaussian_smooth(add_gaussian_noise(base, 0, 20, seed))
            tgt = gaussian_smooth(add_gaussian_noise(shifted(base, ox, oy), 0, 20, seed + 1000))
            res = full_search(BlockRef(ref, 28, 28, 8), tgt, 10)
            hits += abs(res.offset_x - ox) <= 1 and abs(res.offset_y - oy) <= 1
        assert hits >= 45


class TestHierarchicalSearch:
    def test_planted_offset_fewer_evaluations(self):
        img = gaussian_smooth(textured(64, seed=3))
        tgt = shifted(img, 3, -2)
        ref = BlockRef(img, 28, 28, 8)
        full = full_search(ref, tgt, 10)
        hier = hierarchical_search(ref, tgt, 10)
        assert (hier.offset_x, hier.offset_y) == (3, -2)
        assert hier.evaluations == 121 + 9
        assert hier.evaluations < full.evaluations

    def test_never_beats_full(self):
        rng = np.random.default_rng(0)
        for seed in range(20):
            img, tgt = textured(48, seed), textured(48, seed + 100)
            ref = BlockRef(img, int(rng.integers(12, 28)), int(rng.integers(12, 28)), 8)
            assert hierarchical_search(ref, tgt, 10).distance >= full_search(ref, tgt, 10).distance

    def test_odd_block(self):
        img = textured(32)
        with pytest.raises(ArgumentError):
            hierarchical_search(BlockRef(img, 8, 8, 7), img, 4)


def test_pipeline_shape():
    rng = np.random.default_rng(0)
    img = GrayImage(rng.integers(0, 256, size=(512, 512)), 8)
    out = preprocess(img, 20, 0)
    assert out.pixels.shape == (64, 64)
    assert out.bit_depth == 4
    assert 0 <= out.pixels.min() and out.pixels.max() <= 15

import math

import numpy as np
import pytest

from conftest import blob_mask, random_mask, random_raster
from defectaug import raster
from defectaug.raster import (
    AffineParams,
    Mask,
    Raster,
    RasterError,
    augment,
    binarize,
    gaussian_blur,
    gaussian_kernel,
    otsu_threshold,
    to_grayscale,
    warp,
)


def gray(arr):
    return Raster(np.asarray(arr, dtype=np.uint8))


def rgb(r, g, b):
    return Raster(np.array([[[r, g, b]]], dtype=np.uint8))


class TestTypes:
    def test_rejects_out_of_range(self):
        with pytest.raises(RasterError):
            Raster(np.array([[300]], dtype=np.int32))

    def test_rejects_bad_shape(self):
        with pytest.raises(RasterError):
            Raster(np.zeros((2, 2, 2), dtype=np.uint8))

    def test_mask_rejects_non_binary(self):
        with pytest.raises(RasterError):
            Mask(np.array([[0, 2]]))

    def test_affine_rejects_non_positive_scale(self):
        with pytest.raises(RasterError):
            AffineParams(theta=0, p=0.0, q=1.0, center=(0, 0))


class TestGrayscale:
    def test_equal_channels_map_to_themselves(self):
        assert to_grayscale(rgb(77, 77, 77)).pixels[0, 0] == 77

    def test_pure_red(self):
        # round(0.299 * 255) = 76
        assert to_grayscale(rgb(255, 0, 0)).pixels[0, 0] == 76

    def test_black_stays_black(self):
        img = Raster(np.zeros((1, 2, 3), dtype=np.uint8))
        assert np.array_equal(to_grayscale(img).pixels, np.zeros((1, 2)))

    def test_rejects_grayscale_input(self):
        with pytest.raises(RasterError):
            to_grayscale(gray([[0]]))


class TestGaussianBlur:
    @pytest.mark.parametrize("sigma", [0.3, 0.7, 1.0, 2.5, 5.0])
    def test_kernel_sums_to_one(self, sigma):
        assert gaussian_kernel(sigma).sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("value", [0, 37, 100, 255])
    def test_constant_image_unchanged(self, value):
        img = gray(np.full((7, 5), value))
        assert gaussian_blur(img, 1.3) == img

    def test_impulse_matches_kernel_outer_product(self):
        img = np.zeros((9, 9), dtype=np.uint8)
        img[4, 4] = 255
        k = gaussian_kernel(1.0)
        expected = np.floor(255.0 * np.outer(k, k) + 0.5)
        got = gaussian_blur(gray(img), 1.0).pixels
        # radius 3 kernel: the whole response fits inside 9x9
        assert np.array_equal(got[1:8, 1:8], expected[:, :].astype(np.uint8))
        assert got[0, :].sum() == 0

    def test_tiny_sigma_is_near_identity(self, rng):
        img = random_raster(rng, 12, 9)
        out = gaussian_blur(img, 0.1)
        assert np.abs(out.pixels.astype(int) - img.pixels.astype(int)).max() <= 1

    def test_matches_naive_convolution(self, rng):
        img = random_raster(rng, 8, 6)
        sigma = 1.0
        k = gaussian_kernel(sigma)
        r = len(k) // 2
        padded = np.pad(img.pixels.astype(float), r, mode="edge")
        expected = np.zeros_like(img.pixels, dtype=float)
        for dy in range(len(k)):
            for dx in range(len(k)):
                expected += k[dy] * k[dx] * padded[dy:dy + 6, dx:dx + 8]
        assert np.array_equal(gaussian_blur(img, sigma).pixels,
                              np.floor(expected + 0.5).astype(np.uint8))

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(RasterError):
            gaussian_blur(gray([[0]]), 0.0)


class TestBinarize:
    def test_all_dark_defect_dark(self):
        m = binarize(gray(np.zeros((2, 3))), 128)
        assert m.bits.all()

    def test_all_bright_defect_dark(self):
        m = binarize(gray(np.full((2, 3), 255)), 128)
        assert not m.bits.any()

    def test_mixed(self):
        assert binarize(gray([[10, 200]]), 128).bits.tolist() == [[1, 0]]

    def test_polarities_partition(self, rng):
        img = random_raster(rng, 16, 16)
        for t in (0, 50, 128, 255):
            dark = binarize(img, t, "defect-dark").bits
            bright = binarize(img, t, "defect-bright").bits
            assert not (dark & bright).any()
            assert not (dark | bright)[img.pixels == t].any()

    def test_otsu_separates_bimodal(self, rng):
        img = np.where(rng.random((20, 20)) < 0.5, 30, 220).astype(np.uint8)
        t = otsu_threshold(gray(img))
        assert 30 <= t < 220


class TestWarp:
    def test_identity_is_noop(self, rng):
        img = random_raster(rng, 7, 5)
        mask = random_mask(rng, 7, 5)
        out_img, out_mask = warp(img, mask, AffineParams.identity())
        assert out_img == img
        assert out_mask == mask

    def test_quarter_turn_ccw(self):
        img = gray([[1, 2], [3, 4]])
        mask = Mask(np.array([[1, 0], [0, 1]]))
        out_img, out_mask = warp(img, mask, AffineParams(90, 1, 1, (0, 0)))
        assert out_img.pixels.tolist() == np.rot90(img.pixels, 1).tolist()
        assert out_mask.bits.tolist() == np.rot90(mask.bits, 1).tolist()

    def test_x_scale_doubles_width(self, rng):
        img = random_raster(rng, 10, 4)
        mask = random_mask(rng, 10, 4)
        out_img, _ = warp(img, mask, AffineParams(0, 2, 1, (0, 0)))
        assert abs(out_img.width - 20) <= 1
        assert out_img.height == 4

    def test_mask_stays_binary(self, rng):
        img = random_raster(rng, 9, 9)
        mask = random_mask(rng, 9, 9)
        for theta, p, q in [(33.3, 0.7, 1.2), (180, 1.5, 0.5), (275, 1.1, 1.1)]:
            _, out = warp(img, mask, AffineParams(theta, p, q, (0, 0)))
            assert set(np.unique(out.bits)) <= {0, 1}

    def test_area_scaling(self, rng):
        mask = blob_mask(24, 20)
        img = random_raster(rng, 24, 20)
        assert mask.count() >= 100
        for theta, p, q in [(0, 1.3, 0.8), (45, 1.2, 1.2), (120, 0.9, 1.4)]:
            _, out = warp(img, mask, AffineParams(theta, p, q, (0, 0)))
            expected = p * q * mask.count()
            assert abs(out.count() - expected) <= 0.15 * expected

    def test_dimension_mismatch_rejected(self, rng):
        with pytest.raises(RasterError):
            warp(random_raster(rng, 4, 4), random_mask(rng, 5, 4),
                 AffineParams.identity())


class TestAugment:
    def test_translate_zero_is_identity(self, rng):
        img = random_raster(rng, 6, 6)
        assert augment(img, "translate", dx=0, dy=0) == img

    def test_crop_full_frame_is_identity(self, rng):
        img = random_raster(rng, 6, 4)
        assert augment(img, "crop", x=0, y=0, width=6, height=4) == img

    def test_zoom_then_center_crop_constant(self):
        img = gray(np.full((8, 8), 93))
        zoomed = augment(img, "zoom", factor=2.0)
        back = augment(zoomed, "crop", x=4, y=4, width=8, height=8)
        assert back == img

    def test_crop_out_of_bounds_rejected(self, rng):
        with pytest.raises(RasterError):
            augment(random_raster(rng, 4, 4), "crop", x=2, y=2, width=4, height=4)

    def test_rotate_zero_is_identity(self, rng):
        img = random_raster(rng, 5, 7)
        assert augment(img, "rotate", theta=0.0) == img

    def test_unknown_op_rejected(self, rng):
        with pytest.raises(RasterError):
            augment(random_raster(rng, 4, 4), "mirror")


class TestPngIO:
    def test_roundtrip_gray_and_rgb(self, rng, tmp_path):
        for channels in (1, 3):
            img = random_raster(rng, 11, 7, channels)
            raster.write_png(img, tmp_path / "x.png")
            assert raster.read_png(tmp_path / "x.png") == img

    def test_mask_roundtrip(self, rng, tmp_path):
        mask = random_mask(rng, 9, 5)
        raster.write_mask_png(mask, tmp_path / "m.png")
        assert raster.read_mask_png(tmp_path / "m.png") == mask

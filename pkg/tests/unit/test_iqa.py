"""Tests for PSNR, SSIM, the scale space, IFC and VIF."""

import math

import numpy as np
import pytest

from fixtures.test_data import add_noise, text_image
from text_superres.degrade import convolve2d
from text_superres.exceptions import InvalidArgumentError
from text_superres.iqa import (
    VIF_NOISE_VAR,
    evaluate,
    evaluate_many,
    gaussian_window,
    ifc,
    level_sigma,
    level_window,
    psnr,
    scale_space,
    ssim,
    vif,
)
from text_superres.models import Colorspace, ImageBuffer


def _constant(value, size=(64, 64)):
    return ImageBuffer(np.full((1, *size), value), Colorspace.LUMA)


@pytest.fixture
def page():
    return text_image(128, 96, seed=3)


class TestPsnr:
    """Test cases for psnr."""

    def test_known_values(self):
        assert psnr(_constant(0.5), _constant(0.6)) == pytest.approx(20.0, abs=1e-9)
        assert psnr(_constant(0.0), _constant(1.0)) == 0.0

    def test_identical_is_infinite(self, page):
        assert psnr(page, page) == math.inf

    def test_symmetric(self, page):
        noisy = add_noise(page, 0.05)
        assert psnr(page, noisy) == psnr(noisy, page)

    def test_size_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            psnr(_constant(0.5, (8, 8)), _constant(0.5, (8, 9)))

    def test_colour_inputs_use_luma(self, sample_rgb_image):
        assert psnr(sample_rgb_image, sample_rgb_image) == math.inf


class TestSsim:
    """Test cases for ssim."""

    def test_identical(self, page):
        assert ssim(page, page) == pytest.approx(1.0, abs=1e-12)

    def test_constant_pair(self):
        """Only the luminance term differs between two flat images."""
        expected = (2 * 0.5 * 0.6 + 0.01**2) / (0.5**2 + 0.6**2 + 0.01**2)
        assert ssim(_constant(0.5), _constant(0.6)) == pytest.approx(expected, abs=1e-6)
        assert expected == pytest.approx(0.98361, abs=1e-5)

    def test_symmetric_and_bounded(self, page):
        noisy = add_noise(page, 0.1)
        forward_score = ssim(page, noisy)
        assert forward_score == pytest.approx(ssim(noisy, page), abs=1e-12)
        assert -1.0 <= forward_score <= 1.0

    def test_too_small(self):
        with pytest.raises(InvalidArgumentError):
            ssim(_constant(0.5, (10, 10)), _constant(0.5, (10, 10)))

    def test_window_normalized(self):
        assert gaussian_window(11, 1.5).sum() == pytest.approx(1.0, abs=1e-12)


class TestScaleSpace:
    """Test cases for the Gaussian scale space."""

    def test_level_parameters(self):
        assert [level_sigma(k) for k in range(4)] == pytest.approx([3.4, 1.8, 1.0, 0.6])
        assert [level_window(k) for k in range(4)] == [23, 13, 7, 5]

    def test_constant_image_has_empty_subbands(self):
        bands = scale_space(_constant(0.7))
        assert len(bands) == 4
        assert [b.shape for b in bands] == [(64, 64), (32, 32), (16, 16), (8, 8)]
        for band in bands:
            assert np.max(np.abs(band)) < 1e-12

    def test_single_level_shape(self):
        bands = scale_space(_constant(0.2), levels=1)
        assert len(bands) == 1
        assert bands[0].shape == (64, 64)

    def test_impulse_matches_direct_filtering(self):
        """The first subband is the image minus its replicate-padded Gaussian blur."""
        plane = np.zeros((32, 32))
        plane[10, 20] = 1.0
        band = scale_space(ImageBuffer.luma(plane), levels=1)[0]
        window = gaussian_window(23, 3.4)
        padded = np.pad(plane, 11, mode="edge")
        blurred = np.empty_like(plane)
        for i in range(32):
            for j in range(32):
                blurred[i, j] = np.sum(padded[i : i + 23, j : j + 23] * window)
        expected = plane - blurred
        assert np.allclose(band, expected, atol=1e-12)
        assert float(np.sum(band**2)) == pytest.approx(float(np.sum(expected**2)), rel=1e-9)

    def test_too_small(self):
        with pytest.raises(InvalidArgumentError):
            scale_space(_constant(0.5, (32, 32)))
        with pytest.raises(InvalidArgumentError):
            scale_space(_constant(0.5, (16, 16)), levels=1)

    def test_invalid_levels(self):
        with pytest.raises(InvalidArgumentError):
            scale_space(_constant(0.5), levels=0)


class TestInformationFidelity:
    """Test cases for ifc and vif."""

    def test_noise_constant(self):
        assert VIF_NOISE_VAR == 2.0 / 255.0**2

    def test_vif_of_identical_images(self, page):
        assert vif(page, page) == pytest.approx(1.0, abs=1e-9)

    def test_ifc_ratio_is_vif(self, page):
        noisy = add_noise(page, 0.05)
        assert ifc(page, noisy) / ifc(page, page) == pytest.approx(vif(page, noisy), rel=1e-9)

    def test_constant_test_image_carries_no_information(self, page):
        flat = _constant(0.5, (96, 128))
        assert ifc(page, flat) < 0.01 * ifc(page, page)

    def test_constant_reference(self):
        assert vif(_constant(0.5), _constant(0.5)) == 1.0

    def test_blur_worse_than_mild_noise(self, page):
        blurred = convolve2d(page, np.full((3, 3), 1.0 / 9.0))
        noisy = add_noise(page, 0.01)
        assert vif(page, blurred) < vif(page, noisy)

    def test_size_mismatch(self, page):
        with pytest.raises(InvalidArgumentError):
            vif(page, _constant(0.5))


class TestMonotonicity:
    """Every metric degrades as more noise is added."""

    def test_noise_levels(self, page):
        reports = [evaluate(page, add_noise(page, sigma, seed=1)) for sigma in (0.02, 0.05, 0.10)]
        for field in ("psnr", "ssim", "ifc", "vif"):
            values = [getattr(r, field) for r in reports]
            assert values[0] > values[1] > values[2], field


class TestEvaluate:
    """Test cases for evaluate and evaluate_many."""

    def test_evaluate_identical(self, page):
        report = evaluate(page, page)
        assert report.psnr == math.inf
        assert report.ssim == pytest.approx(1.0, abs=1e-12)
        assert report.vif == pytest.approx(1.0, abs=1e-9)
        assert report.ifc == pytest.approx(ifc(page, page))

    def test_evaluate_many_keeps_order(self, page):
        tests = [add_noise(page, sigma, seed=2) for sigma in (0.01, 0.2, 0.05)]
        reports = evaluate_many([(page, t) for t in tests], workers=2)
        assert [r.psnr for r in reports] == [psnr(page, t) for t in tests]

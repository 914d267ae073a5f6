"""Tests for whole-image inference."""

import numpy as np
import pytest

from text_superres.exceptions import InvalidArgumentError, ModelIOError
from text_superres.imagecore import color_convert, read_png, to_uint8, write_png
from text_superres.modelfile import save_model
from text_superres.models import Colorspace
from text_superres.network import init_model, preset_config, zero_model
from text_superres.pipeline import SuperResolver, bicubic_upscale, infer


class TestBicubicUpscale:
    """Test cases for bicubic_upscale."""

    def test_luma_dimensions(self, sample_text_image):
        out = bicubic_upscale(sample_text_image, 2)
        assert out.size == (192, 128)
        assert out.colorspace is Colorspace.LUMA

    def test_rgb_keeps_colorspace(self, sample_rgb_image):
        out = bicubic_upscale(sample_rgb_image, 4)
        assert out.size == (384, 256)
        assert out.colorspace is Colorspace.RGB

    def test_ycbcr_keeps_colorspace(self, sample_rgb_image):
        ycc = color_convert(sample_rgb_image, Colorspace.YCBCR)
        assert bicubic_upscale(ycc, 2).colorspace is Colorspace.YCBCR

    def test_invalid_scale(self, sample_text_image):
        with pytest.raises(InvalidArgumentError):
            bicubic_upscale(sample_text_image, 3)


class TestSuperResolver:
    """Test cases for SuperResolver."""

    @pytest.mark.parametrize("scale", [2, 4])
    def test_zero_model_equals_bicubic(self, sample_text_image, scale):
        cfg = preset_config("tiny", scale=scale)
        resolver = SuperResolver(zero_model(cfg), cfg)
        assert np.array_equal(
            resolver.upscale(sample_text_image).data,
            bicubic_upscale(sample_text_image, scale).data,
        )

    def test_zero_model_equals_bicubic_in_colour(self, sample_rgb_image):
        cfg = preset_config("tiny", scale=2)
        resolver = SuperResolver(zero_model(cfg), cfg)
        assert np.array_equal(
            resolver.upscale(sample_rgb_image).data, bicubic_upscale(sample_rgb_image, 2).data
        )

    def test_chroma_is_bicubic(self, sample_rgb_image):
        """Only the Y plane goes through the network."""
        cfg = preset_config("tiny", scale=2)
        resolver = SuperResolver(init_model(cfg, seed=0), cfg)
        ycc = color_convert(sample_rgb_image, Colorspace.YCBCR)
        out = resolver.upscale(ycc)
        assert np.array_equal(out.data[1:], bicubic_upscale(ycc, 2).data[1:])

    def test_output_is_clamped(self, sample_text_image):
        cfg = preset_config("tiny", scale=2)
        resolver = SuperResolver(init_model(cfg, seed=0), cfg)
        out = resolver.upscale_luma(sample_text_image)
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0

    def test_from_file(self, tmp_path, tiny_config):
        w = init_model(tiny_config, seed=0)
        path = save_model(w, tiny_config, tmp_path / "m.sdtd")
        resolver = SuperResolver.from_file(path)
        assert resolver.scale == 2
        assert resolver.config == tiny_config

    def test_mismatched_weights(self, tiny_config):
        with pytest.raises(InvalidArgumentError):
            SuperResolver(init_model(preset_config("desk"), seed=0), tiny_config)


class TestInfer:
    """Test cases for infer."""

    def test_writes_upscaled_png(self, tmp_path, sample_text_image, tiny_config):
        model = save_model(init_model(tiny_config, seed=0), tiny_config, tmp_path / "m.sdtd")
        source = write_png(sample_text_image, tmp_path / "in.png")
        before = source.read_bytes()
        result = infer(model, source, tmp_path / "out.png")
        written = read_png(tmp_path / "out.png")
        assert written.size == (192, 128)
        assert np.array_equal(to_uint8(written), to_uint8(result))
        assert source.read_bytes() == before

    def test_bicubic_with_scale(self, tmp_path, sample_rgb_image):
        source = write_png(sample_rgb_image, tmp_path / "in.png")
        result = infer(None, source, tmp_path / "out.png", bicubic_only=True, scale=4)
        assert result.size == (384, 256)

    def test_bicubic_scale_from_model(self, tmp_path, sample_text_image):
        cfg = preset_config("tiny", scale=4)
        model = save_model(zero_model(cfg), cfg, tmp_path / "m.sdtd")
        source = write_png(sample_text_image, tmp_path / "in.png")
        assert infer(model, source, tmp_path / "out.png", bicubic_only=True).size == (384, 256)

    def test_needs_model(self, tmp_path, sample_text_image):
        source = write_png(sample_text_image, tmp_path / "in.png")
        with pytest.raises(InvalidArgumentError):
            infer(None, source, tmp_path / "out.png")
        with pytest.raises(InvalidArgumentError):
            infer(None, source, tmp_path / "out.png", bicubic_only=True)

    def test_missing_model(self, tmp_path, sample_text_image):
        source = write_png(sample_text_image, tmp_path / "in.png")
        with pytest.raises(ModelIOError):
            infer(tmp_path / "missing.sdtd", source, tmp_path / "out.png")
        assert not (tmp_path / "out.png").exists()

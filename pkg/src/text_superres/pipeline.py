"""Inference: run a trained model on whole images.

Only the Y plane goes through the network; Cb and Cr are bicubically
upscaled and recombined. Luma images skip the chroma handling.
"""

import logging
import os
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from text_superres.exceptions import InvalidArgumentError
from text_superres.imagecore import color_convert, read_png, upsample_array, write_png
from text_superres.modelfile import load_model
from text_superres.models import Colorspace, ImageBuffer, ModelConfig
from text_superres.network import ModelWeights, check_weights, forward

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]
LumaUpscaler = Callable[[ImageBuffer], ImageBuffer]


def _upscale(img: ImageBuffer, scale: int, upscale_luma: LumaUpscaler) -> ImageBuffer:
    if img.colorspace is Colorspace.LUMA:
        return upscale_luma(img)
    ycc = img if img.colorspace is Colorspace.YCBCR else color_convert(img, Colorspace.YCBCR)
    y = upscale_luma(ImageBuffer(ycc.data[:1], Colorspace.LUMA))
    chroma = upsample_array(ycc.data[1:], scale)
    out = ImageBuffer(np.concatenate([y.data, chroma]), Colorspace.YCBCR)
    if img.colorspace is Colorspace.YCBCR:
        return out
    return color_convert(out, Colorspace.RGB)


def _check_scale(scale: int) -> None:
    if scale not in (2, 4):
        raise InvalidArgumentError(f"upscale factor must be 2 or 4, got {scale}")


def bicubic_upscale(img: ImageBuffer, scale: int) -> ImageBuffer:
    """Bicubic ``scale``-times upscale through the same colour path as inference.

    This is exactly what a model with all-zero parameters produces.
    """
    _check_scale(scale)

    def upscale_luma(y: ImageBuffer) -> ImageBuffer:
        return ImageBuffer(upsample_array(y.data[np.newaxis], scale)[0], Colorspace.LUMA)

    return _upscale(img, scale, upscale_luma)


class SuperResolver:
    """Trained weights plus their architecture, ready to upscale images."""

    def __init__(self, weights: ModelWeights, config: ModelConfig):
        check_weights(weights, config)
        self.weights = weights
        self.config = config

    @classmethod
    def from_file(cls, path: PathLike) -> "SuperResolver":
        weights, config = load_model(path)
        return cls(weights, config)

    @property
    def scale(self) -> int:
        return self.config.scale

    def upscale_luma(self, lr: ImageBuffer) -> ImageBuffer:
        """Run the network on a Luma image; the output is clamped to [0, 1]."""
        out, _ = forward(self.weights, self.config, lr, training=False)
        return ImageBuffer(np.clip(out, 0.0, 1.0), Colorspace.LUMA)

    def upscale(self, img: ImageBuffer) -> ImageBuffer:
        """Upscale a Luma, RGB or YCbCr image, keeping its colorspace."""
        return _upscale(img, self.scale, self.upscale_luma)


def infer(
    model_path: Optional[PathLike],
    input_path: PathLike,
    output_path: PathLike,
    bicubic_only: bool = False,
    scale: Optional[int] = None,
) -> ImageBuffer:
    """Upscale one PNG with a model file and write the result.

    Args:
        model_path: Model file; optional when ``bicubic_only`` is set and
            ``scale`` is given.
        input_path: PNG to upscale; never modified.
        output_path: Destination PNG, replaced atomically.
        bicubic_only: Write the bicubic baseline instead of the network output.
        scale: Factor for the bicubic baseline; defaults to the model's.

    Returns:
        The image that was written.

    Raises:
        InvalidArgumentError: If neither a model nor a scale is available.
        ModelIOError, ModelFileError: From loading the model.
        ImageIOError: From reading or writing the images.
    """
    img = read_png(input_path)
    if bicubic_only:
        if scale is None:
            if model_path is None:
                raise InvalidArgumentError("bicubic upscaling needs a model or a scale")
            scale = load_model(model_path)[1].scale
        result = bicubic_upscale(img, scale)
    else:
        if model_path is None:
            raise InvalidArgumentError("a model file is required")
        result = SuperResolver.from_file(model_path).upscale(img)
    write_png(result, output_path)
    logger.debug(
        "Upscaled %s (%dx%d) to %s (%dx%d)",
        input_path,
        img.width,
        img.height,
        Path(output_path),
        result.width,
        result.height,
    )
    return result

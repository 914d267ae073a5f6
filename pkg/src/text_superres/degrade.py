"""Synthetic degradation of sharp text images into training pairs.

A sharp image is blurred with a motion or defocus point spread function
and then bicubically decimated by the scale factor; the sharp image is the
high-resolution target.
"""

import logging
import math
from typing import Callable, Tuple, Union

import numpy as np
from scipy import ndimage

from text_superres.exceptions import InvalidArgumentError
from text_superres.imagecore import bicubic_resize, to_luma
from text_superres.models import BlurKernel, BlurKind, DegradeConfig, ImageBuffer

logger = logging.getLogger(__name__)

DEFAULT_LENGTH_RANGE = (3.0, 15.0)
DEFAULT_RADIUS_RANGE = (1.0, 4.0)

# Per-axis supersampling used to estimate pixel coverage.
_SUBSAMPLES = 16


def _delta() -> BlurKernel:
    return BlurKernel(np.ones((1, 1)))


def _coverage(half: int, inside: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    """Fraction of each pixel of a (2*half+1)^2 grid lying inside a region."""
    offsets = (np.arange(_SUBSAMPLES) + 0.5) / _SUBSAMPLES - 0.5
    centers = np.arange(-half, half + 1, dtype=np.float64)
    coords = (centers[:, np.newaxis] + offsets[np.newaxis, :]).ravel()
    ys, xs = np.meshgrid(coords, coords, indexing="ij")
    n = 2 * half + 1
    hits = inside(xs, ys).reshape(n, _SUBSAMPLES, n, _SUBSAMPLES)
    return hits.sum(axis=(1, 3)) / float(_SUBSAMPLES * _SUBSAMPLES)


def _crop_to_support(coverage: np.ndarray) -> np.ndarray:
    """Crop a centred grid to the smallest odd square holding its support."""
    half = coverage.shape[0] // 2
    rows, cols = np.nonzero(coverage)
    extent = int(max(np.abs(rows - half).max(), np.abs(cols - half).max()))
    return coverage[half - extent : half + extent + 1, half - extent : half + extent + 1]


def make_blur_kernel(cfg: DegradeConfig) -> BlurKernel:
    """Rasterize the point spread function described by ``cfg``.

    Motion blur is a segment of ``cfg.length`` pixels at ``cfg.angle``
    degrees (counter-clockwise from the +x axis) with a one-pixel width;
    defocus blur is a disk of ``cfg.radius`` pixels. Both use anti-aliased
    pixel coverage and are normalized to sum to 1.

    Raises:
        InvalidArgumentError: If ``cfg.kind`` is NONE.
    """
    if cfg.kind is BlurKind.NONE:
        raise InvalidArgumentError("no blur kernel for kind 'none'")

    if cfg.kind is BlurKind.MOTION:
        if cfg.length <= 1.0:
            return _delta()
        theta = math.radians(cfg.angle)
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        half_length = cfg.length / 2.0

        def inside(xs, ys):
            along = xs * cos_t - ys * sin_t
            across = xs * sin_t + ys * cos_t
            return (np.abs(along) <= half_length) & (np.abs(across) <= 0.5)

        half = int(math.ceil(half_length)) + 1
    else:
        if cfg.radius == 0.0:
            return _delta()
        r2 = cfg.radius * cfg.radius

        def inside(xs, ys):
            return xs * xs + ys * ys <= r2

        half = int(math.ceil(cfg.radius)) + 1

    coverage = _coverage(half, inside)
    if coverage.sum() == 0.0:
        return _delta()
    coverage = _crop_to_support(coverage)
    kernel = BlurKernel(coverage / coverage.sum())
    logger.debug("Built %s kernel of size %d", cfg.kind.value, kernel.size)
    return kernel


def convolve2d(img: ImageBuffer, k: Union[BlurKernel, np.ndarray]) -> ImageBuffer:
    """Convolve every channel with a PSF using replicate borders.

    Raises:
        InvalidArgumentError: If the kernel is not an odd, normalized,
            nonnegative square.
    """
    kernel = k if isinstance(k, BlurKernel) else BlurKernel(k)
    planes = [ndimage.convolve(plane, kernel.taps, mode="nearest") for plane in img.data]
    return ImageBuffer(np.clip(np.stack(planes), 0.0, 1.0), img.colorspace)


def degrade_pair(sharp: ImageBuffer, cfg: DegradeConfig) -> Tuple[ImageBuffer, ImageBuffer]:
    """Produce a (blurred low-resolution, sharp high-resolution) Luma pair.

    Colour inputs are reduced to their Luma plane first. With kind NONE
    the blur stage is skipped.

    Raises:
        InvalidArgumentError: If the image size is not divisible by the scale.
    """
    hr = to_luma(sharp)
    scale = cfg.scale
    if hr.width % scale or hr.height % scale:
        raise InvalidArgumentError(
            f"image size {hr.width}x{hr.height} is not divisible by scale {scale}"
        )
    blurred = hr if cfg.kind is BlurKind.NONE else convolve2d(hr, make_blur_kernel(cfg))
    lr = bicubic_resize(blurred, hr.width // scale, hr.height // scale)
    return lr, hr


def pair_seed(seed: int, index: int) -> int:
    """Derive an independent per-pair seed from a run seed and a pair index."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def random_degrade_config(
    kind: BlurKind,
    scale: int,
    seed: int,
    index: int,
    length_range: Tuple[float, float] = DEFAULT_LENGTH_RANGE,
    radius_range: Tuple[float, float] = DEFAULT_RADIUS_RANGE,
) -> DegradeConfig:
    """Draw blur parameters for pair ``index`` of a run seeded with ``seed``.

    The result depends only on (seed, index), so pairs can be generated in
    any order or in parallel.
    """
    kind = BlurKind(kind)
    derived = pair_seed(seed, index)
    rng = np.random.default_rng(derived)
    length = round(float(rng.uniform(*length_range)), 2)
    angle = round(float(rng.uniform(0.0, 180.0)), 2)
    radius = round(float(rng.uniform(*radius_range)), 2)
    return DegradeConfig(
        kind=kind,
        length=length if kind is BlurKind.MOTION else 1.0,
        angle=angle if kind is BlurKind.MOTION else 0.0,
        radius=radius if kind is BlurKind.DEFOCUS else 0.0,
        scale=scale,
        seed=derived,
    )

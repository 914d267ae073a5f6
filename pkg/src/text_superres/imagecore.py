"""Image substrate: colour conversion, bicubic resampling, patch sampling and PNG I/O.

All public operations take and return ImageBuffer values with samples in
[0, 1]; the array-level helpers (``resize_array``, ``upsample_array``) are
shared with the network so the residual branch and the image path resample
identically.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import List, Union

import numpy as np
from PIL import Image

from text_superres.exceptions import ImageIOError, InvalidArgumentError
from text_superres.models import Colorspace, ImageBuffer, PatchPair

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

# Catmull-Rom
CUBIC_A = -0.5

# Full-range BT.601. The blue weight is derived so that the three luma
# weights sum to exactly 1.0 in floating point.
_WR = 0.299
_WG = 0.587
_WB = 1.0 - (_WR + _WG)
_CB_SCALE = 2.0 * (1.0 - _WB)
_CR_SCALE = 2.0 * (1.0 - _WR)


def _to_ycbcr(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb
    y = (_WR * r + _WG * g) + _WB * b
    cb = (b - y) / _CB_SCALE + 0.5
    cr = (r - y) / _CR_SCALE + 0.5
    return np.stack([y, cb, cr])


def _to_rgb(ycbcr: np.ndarray) -> np.ndarray:
    y, cb, cr = ycbcr
    r = y + _CR_SCALE * (cr - 0.5)
    b = y + _CB_SCALE * (cb - 0.5)
    g = (y - _WR * r - _WB * b) / _WG
    return np.stack([r, g, b])


def color_convert(img: ImageBuffer, target: Colorspace) -> ImageBuffer:
    """Convert an image between RGB, YCbCr and Luma.

    Supported pairs are RGB to YCbCr, YCbCr to RGB, and YCbCr or RGB to
    Luma (the Y plane). Output samples are clamped to [0, 1].

    Raises:
        InvalidArgumentError: If the pair is not supported or the image is
            already in the target colorspace.
    """
    target = Colorspace(target)
    source = img.colorspace
    if source is target:
        raise InvalidArgumentError(f"image is already {target.value}")

    if source is Colorspace.RGB and target is Colorspace.YCBCR:
        data = _to_ycbcr(img.data)
    elif source is Colorspace.YCBCR and target is Colorspace.RGB:
        data = _to_rgb(img.data)
    elif source is Colorspace.YCBCR and target is Colorspace.LUMA:
        data = img.data[:1]
    elif source is Colorspace.RGB and target is Colorspace.LUMA:
        data = _to_ycbcr(img.data)[:1]
    else:
        raise InvalidArgumentError(
            f"unsupported conversion {source.value} -> {target.value}"
        )
    return ImageBuffer(np.clip(data, 0.0, 1.0), target)


def to_luma(img: ImageBuffer) -> ImageBuffer:
    """Return the Luma plane of an image, or the image itself if already Luma."""
    if img.colorspace is Colorspace.LUMA:
        return img
    return color_convert(img, Colorspace.LUMA)


def cubic_weights(t: Union[float, np.ndarray]) -> np.ndarray:
    """Catmull-Rom weights of the four taps at offsets -1, 0, 1, 2.

    Args:
        t: Fractional phase(s) in [0, 1).

    Returns:
        Array of shape ``(..., 4)``.
    """
    t = np.asarray(t, dtype=np.float64)
    distance = np.abs(np.stack([1.0 + t, t, 1.0 - t, 2.0 - t], axis=-1))
    d2 = distance * distance
    d3 = d2 * distance
    near = (CUBIC_A + 2.0) * d3 - (CUBIC_A + 3.0) * d2 + 1.0
    far = CUBIC_A * d3 - 5.0 * CUBIC_A * d2 + 8.0 * CUBIC_A * distance - 4.0 * CUBIC_A
    return np.where(distance <= 1.0, near, np.where(distance < 2.0, far, 0.0))


def _resample_matrix(in_size: int, out_size: int) -> np.ndarray:
    """Dense (out_size, in_size) bicubic interpolation matrix with replicate borders."""
    src = (np.arange(out_size) + 0.5) * (in_size / out_size) - 0.5
    base = np.floor(src).astype(np.int64)
    weights = cubic_weights(src - base)
    taps = np.clip(base[:, np.newaxis] + np.arange(-1, 3), 0, in_size - 1)
    matrix = np.zeros((out_size, in_size))
    rows = np.repeat(np.arange(out_size), 4)
    np.add.at(matrix, (rows, taps.ravel()), weights.ravel())
    return matrix


def resize_array(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bicubically resample the last two axes of ``arr`` without clamping.

    Leading axes are carried through; floating dtypes are preserved.
    """
    dtype = arr.dtype if np.issubdtype(arr.dtype, np.floating) else np.float64
    rows = _resample_matrix(arr.shape[-2], out_h).astype(dtype)
    cols = _resample_matrix(arr.shape[-1], out_w).astype(dtype)
    return np.matmul(np.matmul(rows, arr.astype(dtype, copy=False)), cols.T)


def upsample_array(arr: np.ndarray, scale: int) -> np.ndarray:
    """Bicubic ``scale``-times upsample of the last two axes, clamped to [0, 1]."""
    out_h, out_w = arr.shape[-2] * scale, arr.shape[-1] * scale
    return np.clip(resize_array(arr, out_h, out_w), 0.0, 1.0)


def bicubic_resize(img: ImageBuffer, out_w: int, out_h: int) -> ImageBuffer:
    """Resize an image with the Catmull-Rom kernel and replicate borders.

    Raises:
        InvalidArgumentError: If a requested dimension is below 1.
    """
    if out_w < 1 or out_h < 1:
        raise InvalidArgumentError(f"cannot resize to {out_w}x{out_h}")
    data = np.clip(resize_array(img.data, int(out_h), int(out_w)), 0.0, 1.0)
    return ImageBuffer(data, img.colorspace)


def sample_patch_pairs(
    lr: ImageBuffer, hr: ImageBuffer, p: int, n: int, seed: int
) -> List[PatchPair]:
    """Crop ``n`` aligned patch pairs at random LR origins.

    Each LR crop is ``p`` x ``p``; the HR crop is ``S*p`` x ``S*p`` at the
    scaled origin, where ``S`` is the integer HR/LR ratio.

    Raises:
        InvalidArgumentError: If the images are not Luma, the HR size is not
            an integer multiple of the LR size, or ``p`` does not fit.
    """
    if lr.colorspace is not Colorspace.LUMA or hr.colorspace is not Colorspace.LUMA:
        raise InvalidArgumentError("patch sampling requires Luma images")
    scale = hr.width // lr.width
    if scale < 1 or hr.width != scale * lr.width or hr.height != scale * lr.height:
        raise InvalidArgumentError(
            f"HR size {hr.width}x{hr.height} is not an integer multiple of "
            f"LR size {lr.width}x{lr.height}"
        )
    if not 1 <= p <= min(lr.width, lr.height):
        raise InvalidArgumentError(
            f"patch size {p} does not fit a {lr.width}x{lr.height} image"
        )
    if n < 0:
        raise InvalidArgumentError("patch count must be nonnegative")

    rng = np.random.default_rng(seed)
    xs = rng.integers(0, lr.width - p + 1, size=n)
    ys = rng.integers(0, lr.height - p + 1, size=n)
    pairs = []
    for x, y in zip(xs.tolist(), ys.tolist()):
        lr_crop = lr.data[:, y : y + p, x : x + p]
        hr_crop = hr.data[:, scale * y : scale * (y + p), scale * x : scale * (x + p)]
        pairs.append(
            PatchPair(
                ImageBuffer(lr_crop, Colorspace.LUMA),
                ImageBuffer(hr_crop, Colorspace.LUMA),
                (x, y),
            )
        )
    return pairs


def from_uint8(arr: np.ndarray) -> ImageBuffer:
    """Build an image from an 8-bit (H, W) or (H, W, 3) array."""
    data = np.asarray(arr, dtype=np.float64) / 255.0
    if data.ndim == 2:
        return ImageBuffer(data[np.newaxis], Colorspace.LUMA)
    if data.ndim == 3 and data.shape[2] == 3:
        return ImageBuffer(np.moveaxis(data, 2, 0), Colorspace.RGB)
    raise InvalidArgumentError(f"unsupported 8-bit array shape {arr.shape}")


def to_uint8(img: ImageBuffer) -> np.ndarray:
    """Quantize to 8 bits with round-half-away, returning (H, W) or (H, W, 3)."""
    values = np.clip(np.floor(img.data * 255.0 + 0.5), 0, 255).astype(np.uint8)
    if img.channels == 1:
        return values[0]
    return np.ascontiguousarray(np.moveaxis(values, 0, 2))


def read_png(path: PathLike) -> ImageBuffer:
    """Read an 8-bit grayscale or RGB PNG.

    Palette and alpha variants are flattened to RGB or grayscale; other
    formats are rejected.

    Raises:
        ImageIOError: If the file cannot be read or is not a supported PNG.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format != "PNG":
                raise ImageIOError(f"{path}: not a PNG file ({im.format})")
            if im.mode in ("1", "L", "LA"):
                im = im.convert("L")
            elif im.mode in ("RGB", "RGBA", "P", "PA"):
                im = im.convert("RGB")
            else:
                raise ImageIOError(f"{path}: unsupported PNG mode {im.mode}")
            arr = np.asarray(im, dtype=np.uint8)
    except ImageIOError:
        raise
    except OSError as e:
        raise ImageIOError(f"{path}: {e}") from e
    logger.debug("Read %s (%dx%d, %s)", path, arr.shape[1], arr.shape[0], im.mode)
    return from_uint8(arr)


def write_png(img: ImageBuffer, path: PathLike) -> Path:
    """Write an image as an 8-bit PNG, atomically.

    YCbCr images are converted to RGB first. The file is written to a
    temporary name in the target directory and renamed on success.

    Raises:
        ImageIOError: If the file cannot be written.
    """
    path = Path(path)
    if img.colorspace is Colorspace.YCBCR:
        img = color_convert(img, Colorspace.RGB)
    pixels = Image.fromarray(to_uint8(img))
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile(
            dir=path.parent or ".", prefix=f".{path.stem}.", suffix=".tmp", delete=False
        ) as tmp:
            tmp_name = tmp.name
            pixels.save(tmp, format="PNG")
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise ImageIOError(f"{path}: {e}") from e
    logger.debug("Wrote %s", path)
    return path

"""Full-reference image quality metrics: PSNR, SSIM, IFC and VIF.

IFC and VIF share a pixel-domain Gaussian scale space. At level ``k`` the
image is smoothed with a Gaussian of ``sigma_k = (2**max(4 - k, 1) + 1) / 5``
(window ``2 * ceil(3 * sigma_k) + 1``, replicate borders); the subband is
the image minus its smoothed version and the next level is the smoothed
image decimated by 2. Local statistics of each subband use the 3x3 core of
the same Gaussian. IFC is the information numerator; VIF divides it by the
reference self-information.

Every metric works on the Luma plane in [0, 1]; RGB and YCbCr inputs are
reduced to Luma first.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy import ndimage, signal

from text_superres.exceptions import InvalidArgumentError
from text_superres.imagecore import to_luma
from text_superres.models import ImageBuffer, IqaReport

logger = logging.getLogger(__name__)

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

VIF_LEVELS = 4
# Visual noise variance: 2.0 in 8-bit units.
VIF_NOISE_VAR = 2.0 / 255.0**2
# Reference variances below this carry no information.
VIF_VAR_FLOOR = 1e-10


def _planes(ref: ImageBuffer, test: ImageBuffer) -> Tuple[np.ndarray, np.ndarray]:
    a = to_luma(ref).plane()
    b = to_luma(test).plane()
    if a.shape != b.shape:
        raise InvalidArgumentError(
            f"image sizes differ: {a.shape[1]}x{a.shape[0]} vs {b.shape[1]}x{b.shape[0]}"
        )
    return a, b


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """Normalized 2-D Gaussian of odd ``size``."""
    half = size // 2
    axis = np.arange(-half, half + 1, dtype=np.float64)
    profile = np.exp(-(axis * axis) / (2.0 * sigma * sigma))
    window = np.outer(profile, profile)
    return window / window.sum()


def psnr(ref: ImageBuffer, test: ImageBuffer, max_val: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical images.

    Raises:
        InvalidArgumentError: If the images differ in size.
    """
    a, b = _planes(ref, test)
    diff = a - b
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(max_val * max_val / mse)


def ssim(ref: ImageBuffer, test: ImageBuffer) -> float:
    """Mean structural similarity over 11x11 Gaussian windows (sigma 1.5).

    Only windows lying fully inside the image contribute.

    Raises:
        InvalidArgumentError: If the sizes differ or either side is below 11.
    """
    a, b = _planes(ref, test)
    if min(a.shape) < SSIM_WINDOW:
        raise InvalidArgumentError(
            f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got "
            f"{a.shape[1]}x{a.shape[0]}"
        )
    window = gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2

    def local(values: np.ndarray) -> np.ndarray:
        return signal.convolve2d(values, window, mode="valid")

    mu_a = local(a)
    mu_b = local(b)
    var_a = local(a * a) - mu_a * mu_a
    var_b = local(b * b) - mu_b * mu_b
    cov = local(a * b) - mu_a * mu_b
    numerator = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    denominator = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(numerator / denominator))


def level_sigma(level: int) -> float:
    return (2.0 ** max(4 - level, 1) + 1.0) / 5.0


def level_window(level: int) -> int:
    return 2 * math.ceil(3.0 * level_sigma(level)) + 1


def _smooth(plane: np.ndarray, window: np.ndarray) -> np.ndarray:
    return ndimage.correlate(plane, window, mode="nearest")


def scale_space(img: ImageBuffer, levels: int = VIF_LEVELS) -> List[np.ndarray]:
    """Decompose an image into ``levels`` mean-removed subbands.

    Raises:
        InvalidArgumentError: If ``levels`` < 1 or the image becomes smaller
            than a level's Gaussian window before all levels are built.
    """
    if levels < 1:
        raise InvalidArgumentError("at least one scale level is required")
    plane = to_luma(img).plane()
    subbands = []
    for level in range(levels):
        size = level_window(level)
        if min(plane.shape) < size:
            raise InvalidArgumentError(
                f"image too small for {levels} scale levels "
                f"(level {level} is {plane.shape[1]}x{plane.shape[0]}, needs {size})"
            )
        smoothed = _smooth(plane, gaussian_window(size, level_sigma(level)))
        subbands.append(plane - smoothed)
        plane = smoothed[::2, ::2]
    return subbands


def _stats_window(level: int) -> np.ndarray:
    core = gaussian_window(level_window(level), level_sigma(level))
    half = core.shape[0] // 2
    core = core[half - 1 : half + 2, half - 1 : half + 2]
    return core / core.sum()


def _information_terms(ref: ImageBuffer, test: ImageBuffer) -> Tuple[float, float]:
    """Summed (numerator, denominator) information over all levels and windows."""
    _planes(ref, test)
    ref_bands = scale_space(ref, VIF_LEVELS)
    test_bands = scale_space(test, VIF_LEVELS)
    numerator = 0.0
    denominator = 0.0
    for level, (c, d) in enumerate(zip(ref_bands, test_bands)):
        window = _stats_window(level)
        mu_c = _smooth(c, window)
        mu_d = _smooth(d, window)
        var_c = np.maximum(_smooth(c * c, window) - mu_c * mu_c, 0.0)
        var_d = np.maximum(_smooth(d * d, window) - mu_d * mu_d, 0.0)
        cov = _smooth(c * d, window) - mu_c * mu_d

        informative = var_c > VIF_VAR_FLOOR
        var_c = np.where(informative, var_c, 0.0)
        gain = np.divide(cov, var_c, out=np.zeros_like(cov), where=informative)
        noise = var_d - gain * cov

        flat = var_d <= VIF_VAR_FLOOR
        gain = np.where(flat, 0.0, gain)
        noise = np.where(flat, 0.0, noise)
        negative = gain < 0.0
        noise = np.where(negative, var_d, noise)
        gain = np.where(negative, 0.0, gain)
        noise = np.where(informative, noise, var_d)
        noise = np.maximum(noise, 0.0)

        numerator += float(
            np.sum(np.log2(1.0 + gain * gain * var_c / (noise + VIF_NOISE_VAR)))
        )
        denominator += float(np.sum(np.log2(1.0 + var_c / VIF_NOISE_VAR)))
    return numerator, denominator


def ifc(ref: ImageBuffer, test: ImageBuffer) -> float:
    """Information fidelity: information about the reference kept in ``test``.

    Raises:
        InvalidArgumentError: If the sizes differ or the images are too small
            for four scale levels.
    """
    numerator, _ = _information_terms(ref, test)
    return numerator


def vif(ref: ImageBuffer, test: ImageBuffer) -> float:
    """Visual information fidelity: IFC over the reference self-information.

    A reference with no information (constant image) scores 1.0.

    Raises:
        InvalidArgumentError: If the sizes differ or the images are too small
            for four scale levels.
    """
    numerator, denominator = _information_terms(ref, test)
    if denominator == 0.0:
        return 1.0
    return numerator / denominator


def evaluate(ref: ImageBuffer, test: ImageBuffer) -> IqaReport:
    """All four metrics of one pair."""
    numerator, denominator = _information_terms(ref, test)
    return IqaReport(
        psnr=psnr(ref, test),
        ssim=ssim(ref, test),
        ifc=numerator,
        vif=numerator / denominator if denominator else 1.0,
    )


def evaluate_many(
    pairs: Iterable[Tuple[ImageBuffer, ImageBuffer]], workers: Optional[int] = None
) -> List[IqaReport]:
    """Evaluate pairs concurrently; results keep the input order."""
    pairs = list(pairs)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        reports = list(executor.map(lambda pair: evaluate(*pair), pairs))
    logger.debug("Evaluated %d image pairs", len(reports))
    return reports

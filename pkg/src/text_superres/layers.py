"""Layer primitives of the network and their reverse-mode adjoints.

Tensors are numpy arrays laid out channel-major: ``(C, H, W)`` for one
sample or ``(N, C, H, W)`` for a batch; every function accepts either and
returns the same rank it was given. Kernels are ``(c_out, c_in, k, k)``
with ``k`` in {1, 3}; 3x3 kernels use zero padding of one pixel so the
spatial size is preserved.
"""

from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from text_superres.exceptions import InvalidArgumentError
from text_superres.models import Activator

LEAKY_SLOPE = 0.2
SELU_ALPHA = 1.6732632423543772
SELU_SCALE = 1.0507009873554805


def _batched(x: np.ndarray) -> Tuple[np.ndarray, bool]:
    if x.ndim == 3:
        return x[np.newaxis], True
    if x.ndim == 4:
        return x, False
    raise InvalidArgumentError(f"expected a (C, H, W) or (N, C, H, W) tensor, got {x.shape}")


def _restore(x: np.ndarray, squeeze: bool) -> np.ndarray:
    return x[0] if squeeze else x


def _windows3(x: np.ndarray) -> np.ndarray:
    """3x3 neighbourhoods of a zero-padded batch: (N, C, H, W, 3, 3)."""
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    return sliding_window_view(padded, (3, 3), axis=(2, 3))


def _check_kernel(kernel: np.ndarray, channels: int) -> int:
    if kernel.ndim != 4 or kernel.shape[2] != kernel.shape[3]:
        raise InvalidArgumentError(f"kernel must be (c_out, c_in, k, k), got {kernel.shape}")
    if kernel.shape[2] not in (1, 3):
        raise InvalidArgumentError(f"kernel size must be 1 or 3, got {kernel.shape[2]}")
    if kernel.shape[1] != channels:
        raise InvalidArgumentError(
            f"kernel expects {kernel.shape[1]} input channels, tensor has {channels}"
        )
    return kernel.shape[2]


def conv2d(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Same-size 2-D convolution (cross-correlation) plus per-channel bias.

    Raises:
        InvalidArgumentError: On a channel mismatch or unsupported kernel size.
    """
    xb, squeeze = _batched(x)
    size = _check_kernel(kernel, xb.shape[1])
    if size == 1:
        out = np.einsum("oc,nchw->nohw", kernel[:, :, 0, 0], xb, optimize=True)
    else:
        out = np.tensordot(_windows3(xb), kernel, axes=([1, 4, 5], [1, 2, 3]))
        out = out.transpose(0, 3, 1, 2)
    out = np.ascontiguousarray(out + bias[np.newaxis, :, np.newaxis, np.newaxis])
    return _restore(out, squeeze)


def conv2d_backward(
    x: np.ndarray, kernel: np.ndarray, grad_out: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of ``conv2d`` with respect to its input, kernel and bias."""
    xb, squeeze = _batched(x)
    gb, _ = _batched(grad_out)
    size = _check_kernel(kernel, xb.shape[1])
    grad_bias = gb.sum(axis=(0, 2, 3))
    if size == 1:
        weights = kernel[:, :, 0, 0]
        grad_kernel = np.einsum("nohw,nchw->oc", gb, xb, optimize=True)[:, :, None, None]
        grad_x = np.einsum("oc,nohw->nchw", weights, gb, optimize=True)
    else:
        grad_kernel = np.tensordot(gb, _windows3(xb), axes=([0, 2, 3], [0, 2, 3]))
        flipped = kernel[:, :, ::-1, ::-1]
        grad_x = np.tensordot(_windows3(gb), flipped, axes=([1, 4, 5], [0, 2, 3]))
        grad_x = grad_x.transpose(0, 3, 1, 2)
    return _restore(np.ascontiguousarray(grad_x), squeeze), grad_kernel, grad_bias


def _channel_view(values: np.ndarray, ndim: int) -> np.ndarray:
    """Broadcast a per-channel vector against a (C, H, W) or (N, C, H, W) tensor."""
    return values[:, None, None] if ndim == 3 else values[None, :, None, None]


def activate(
    x: np.ndarray, kind: Activator, slope: Optional[np.ndarray] = None
) -> np.ndarray:
    """Apply an activator elementwise; PReLU uses one learned slope per channel."""
    kind = Activator(kind)
    if kind is Activator.PRELU:
        if slope is None or slope.shape != (x.shape[-3],):
            raise InvalidArgumentError("PReLU needs one slope per channel")
        return np.where(x > 0, x, _channel_view(slope, x.ndim) * x)
    if kind is Activator.RELU:
        return np.maximum(x, 0)
    if kind is Activator.LEAKY_RELU:
        return np.where(x > 0, x, LEAKY_SLOPE * x)
    if kind is Activator.SIGMOID:
        return expit(x)
    if kind is Activator.TANH:
        return np.tanh(x)
    return SELU_SCALE * np.where(x > 0, x, SELU_ALPHA * np.expm1(np.minimum(x, 0)))


def activate_backward(
    x: np.ndarray,
    kind: Activator,
    slope: Optional[np.ndarray],
    grad_out: np.ndarray,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Gradients of ``activate`` with respect to its input and PReLU slope.

    ``x`` is the pre-activation value. The slope gradient is None for
    activators without learned parameters.
    """
    kind = Activator(kind)
    positive = x > 0
    if kind is Activator.PRELU:
        grad_x = np.where(positive, grad_out, _channel_view(slope, x.ndim) * grad_out)
        axes = (1, 2) if x.ndim == 3 else (0, 2, 3)
        grad_slope = np.where(positive, 0, x * grad_out).sum(axis=axes)
        return grad_x, grad_slope
    if kind is Activator.RELU:
        return np.where(positive, grad_out, 0), None
    if kind is Activator.LEAKY_RELU:
        return np.where(positive, grad_out, LEAKY_SLOPE * grad_out), None
    if kind is Activator.SIGMOID:
        s = expit(x)
        return grad_out * s * (1 - s), None
    if kind is Activator.TANH:
        t = np.tanh(x)
        return grad_out * (1 - t * t), None
    negative = SELU_SCALE * SELU_ALPHA * np.exp(np.minimum(x, 0))
    return grad_out * np.where(positive, SELU_SCALE, negative), None


def dropout(
    x: np.ndarray, keep: float, rng: Optional[np.random.Generator]
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Inverted dropout: keep each value with probability ``keep`` and rescale.

    Returns the dropped tensor and the scaled mask (None when ``keep`` is 1).
    """
    if keep >= 1.0:
        return x, None
    mask = (rng.random(x.shape) < keep).astype(x.dtype) / x.dtype.type(keep)
    return x * mask, mask


def depth_to_space(x: np.ndarray, factor: int) -> np.ndarray:
    """Rearrange ``factor**2`` channel blocks into a ``factor``-times larger grid.

    Input channel ``c * factor**2 + k`` at (i, j) lands in output channel
    ``c`` at (factor*i + k // factor, factor*j + k % factor).

    Raises:
        InvalidArgumentError: If the channel count is not divisible by factor**2.
    """
    xb, squeeze = _batched(x)
    n, channels, height, width = xb.shape
    if factor < 1 or channels % (factor * factor):
        raise InvalidArgumentError(
            f"{channels} channels cannot be shuffled by factor {factor}"
        )
    out = xb.reshape(n, channels // (factor * factor), factor, factor, height, width)
    out = out.transpose(0, 1, 4, 2, 5, 3).reshape(
        n, channels // (factor * factor), height * factor, width * factor
    )
    return _restore(out, squeeze)


def space_to_depth(x: np.ndarray, factor: int) -> np.ndarray:
    """Inverse of ``depth_to_space``; also its adjoint.

    Raises:
        InvalidArgumentError: If the spatial size is not divisible by factor.
    """
    xb, squeeze = _batched(x)
    n, channels, height, width = xb.shape
    if factor < 1 or height % factor or width % factor:
        raise InvalidArgumentError(
            f"{height}x{width} grid cannot be folded by factor {factor}"
        )
    out = xb.reshape(n, channels, height // factor, factor, width // factor, factor)
    out = out.transpose(0, 1, 3, 5, 2, 4).reshape(
        n, channels * factor * factor, height // factor, width // factor
    )
    return _restore(out, squeeze)

"""Skip-connection super-resolution network.

A cascade of 3x3 feature layers whose outputs are concatenated and fed to a
Network-in-Network reconstruction block (parallel 1x1 path A1 and
1x1 -> 3x3 path B1 -> B2). A final 1x1 layer emits S**2 channels that are
shuffled into an S-times larger grid and added to the bicubic upsample of
the input.

Parameters are named ``feature.<i>.{kernel,bias,slope}``,
``recon.{a1,b1,b2}.{kernel,bias,slope}`` and ``recon.l.{kernel,bias}``;
slopes exist only for the PReLU activator. This order is the manifest
order of the model file.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from text_superres.exceptions import InvalidArgumentError, InvalidStateError
from text_superres.imagecore import upsample_array
from text_superres.layers import (
    activate,
    activate_backward,
    conv2d,
    conv2d_backward,
    depth_to_space,
    dropout,
    space_to_depth,
)
from text_superres.models import Activator, Colorspace, ImageBuffer, ModelConfig

logger = logging.getLogger(__name__)

Gradients = Dict[str, np.ndarray]

PRESETS: Dict[str, Dict] = {
    "sdt": {},
    "relu": {"activator": Activator.RELU},
    "dcscn": {
        "feature_layers": 7,
        "first_filters": 96,
        "last_filters": 32,
        "filter_decay_gamma": 1.5,
    },
    "sigmoid": {
        "first_filters": 19,
        "last_filters": 7,
        "activator": Activator.SIGMOID,
        "recon_a1": 128,
        "recon_b1": 3,
        "recon_b2": 3,
    },
    "sigmoid-wide": {
        "first_filters": 128,
        "last_filters": 3,
        "activator": Activator.SIGMOID,
        "recon_a1": 19,
        "recon_b1": 7,
        "recon_b2": 7,
    },
    "desk": {
        "feature_layers": 4,
        "first_filters": 64,
        "last_filters": 32,
        "filters": (64, 48, 38, 32),
    },
    "tiny": {
        "feature_layers": 2,
        "first_filters": 4,
        "last_filters": 3,
        "filters": (4, 3),
    },
}

_RECON_UNITS = ("recon.a1", "recon.b1", "recon.b2")

_tokens = itertools.count(1)


def preset_config(name: str, scale: int = 2, **overrides) -> ModelConfig:
    """Build a ModelConfig from a named architecture profile.

    Raises:
        InvalidArgumentError: If the profile name is unknown.
    """
    if name not in PRESETS:
        raise InvalidArgumentError(
            f"unknown architecture profile '{name}' (choose from {', '.join(PRESETS)})"
        )
    return ModelConfig(scale=scale, **{**PRESETS[name], **overrides})


def filter_schedule(first: int, last: int, layers: int, gamma: float) -> List[int]:
    """Filter counts of the feature-extraction layers.

    ``c_i = int((first - last) * (1 - (i / (layers - 1)) ** (1 / gamma)) + last)``.
    Truncation (rather than rounding) reproduces the published 8-layer
    schedule [196, 163, 138, 115, 93, 72, 51, 32] for (196, 32, 8, 1.2).

    Raises:
        InvalidArgumentError: If layers < 2, first < last, last < 1 or gamma <= 0.
    """
    if layers < 2 or not first >= last >= 1 or gamma <= 0:
        raise InvalidArgumentError(
            f"invalid schedule parameters first={first} last={last} "
            f"layers={layers} gamma={gamma}"
        )
    counts = []
    for i in range(layers):
        decay = (i / (layers - 1)) ** (1.0 / gamma)
        counts.append(int((first - last) * (1.0 - decay) + last))
    return counts


def feature_filters(cfg: ModelConfig) -> List[int]:
    """The feature-layer schedule of a configuration (explicit or generated)."""
    if cfg.filters is not None:
        return list(cfg.filters)
    counts = filter_schedule(
        cfg.first_filters, cfg.last_filters, cfg.feature_layers, cfg.filter_decay_gamma
    )
    if any(a < b for a, b in zip(counts, counts[1:])):
        raise InvalidArgumentError(f"filter schedule is not non-increasing: {counts}")
    return counts


def concat_channels(cfg: ModelConfig) -> int:
    """Channel count of the concatenated skip connections."""
    return sum(feature_filters(cfg))


def parameter_shapes(cfg: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    """Ordered parameter manifest of a configuration."""
    prelu = cfg.activator is Activator.PRELU
    shapes: Dict[str, Tuple[int, ...]] = {}

    def unit(name: str, c_out: int, c_in: int, size: int) -> None:
        shapes[f"{name}.kernel"] = (c_out, c_in, size, size)
        shapes[f"{name}.bias"] = (c_out,)
        if prelu:
            shapes[f"{name}.slope"] = (c_out,)

    c_in = 1
    filters = feature_filters(cfg)
    for i, c_out in enumerate(filters):
        unit(f"feature.{i}", c_out, c_in, 3)
        c_in = c_out
    c_cat = sum(filters)
    unit("recon.a1", cfg.recon_a1, c_cat, 1)
    unit("recon.b1", cfg.recon_b1, c_cat, 1)
    unit("recon.b2", cfg.recon_b2, cfg.recon_b1, 3)
    shapes["recon.l.kernel"] = (cfg.scale * cfg.scale, cfg.recon_a1 + cfg.recon_b2, 1, 1)
    shapes["recon.l.bias"] = (cfg.scale * cfg.scale,)
    return shapes


@dataclass(frozen=True, eq=False)
class ModelWeights:
    """Immutable, ordered set of network parameters.

    Every instance carries a unique ``token`` so forward caches can be
    matched to the weights that produced them.
    """

    params: Dict[str, np.ndarray]
    token: int = field(default_factory=lambda: next(_tokens))

    def __post_init__(self):
        frozen = {}
        for name, value in self.params.items():
            array = np.array(value)
            array.setflags(write=False)
            frozen[name] = array
        object.__setattr__(self, "params", frozen)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    def __contains__(self, name: str) -> bool:
        return name in self.params

    def get(self, name: str) -> Optional[np.ndarray]:
        return self.params.get(name)

    @property
    def names(self) -> List[str]:
        return list(self.params)

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.params.values())).dtype

    @property
    def parameter_count(self) -> int:
        return sum(int(a.size) for a in self.params.values())

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: tuple(a.shape) for name, a in self.params.items()}

    def astype(self, dtype) -> "ModelWeights":
        return ModelWeights({n: a.astype(dtype) for n, a in self.params.items()})


def check_weights(w: ModelWeights, cfg: ModelConfig) -> None:
    """Verify that the weights match the configuration's manifest.

    Raises:
        InvalidArgumentError: On any missing, extra or misshaped parameter.
    """
    expected = parameter_shapes(cfg)
    actual = w.shapes()
    if list(expected.items()) != list(actual.items()):
        missing = sorted(set(expected) - set(actual))
        extra = sorted(set(actual) - set(expected))
        raise InvalidArgumentError(
            f"weights do not match the configuration (missing {missing}, extra {extra})"
        )


def init_model(cfg: ModelConfig, seed: int, dtype=np.float32) -> ModelWeights:
    """He-initialize every kernel; biases and PReLU slopes start at zero."""
    rng = np.random.default_rng(seed)
    params = {}
    for name, shape in parameter_shapes(cfg).items():
        if name.endswith(".kernel"):
            fan_in = shape[1] * shape[2] * shape[3]
            std = math.sqrt(2.0 / fan_in)
            params[name] = rng.normal(0.0, std, size=shape).astype(dtype)
        else:
            params[name] = np.zeros(shape, dtype=dtype)
    weights = ModelWeights(params)
    logger.debug(
        "Initialized %d parameters, schedule %s", weights.parameter_count, feature_filters(cfg)
    )
    return weights


def zero_model(cfg: ModelConfig, dtype=np.float32) -> ModelWeights:
    """Weights with every learned parameter set to zero."""
    return ModelWeights({n: np.zeros(s, dtype=dtype) for n, s in parameter_shapes(cfg).items()})


@dataclass
class _Step:
    input: np.ndarray
    pre: np.ndarray
    mask: Optional[np.ndarray] = None


@dataclass
class ForwardCache:
    """Activations retained by ``forward`` for ``backward``."""

    token: int
    training: bool
    squeeze: bool
    output_shape: Tuple[int, ...]
    steps: Dict[str, _Step] = field(default_factory=dict)


def _as_network_input(lr_input: Union[ImageBuffer, np.ndarray]) -> Tuple[np.ndarray, bool]:
    if isinstance(lr_input, ImageBuffer):
        if lr_input.colorspace is not Colorspace.LUMA:
            raise InvalidArgumentError("network input must be a Luma image")
        x = lr_input.data
    else:
        x = np.asarray(lr_input)
    if x.ndim == 3:
        x, squeeze = x[np.newaxis], True
    elif x.ndim == 4:
        squeeze = False
    else:
        raise InvalidArgumentError(f"network input must be (1, H, W) or (N, 1, H, W), got {x.shape}")
    if x.shape[1] != 1:
        raise InvalidArgumentError("network input must be a single Luma channel")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("network input contains non-finite values")
    return x, squeeze


def forward(
    w: ModelWeights,
    cfg: ModelConfig,
    lr_input: Union[ImageBuffer, np.ndarray],
    training: bool = False,
    dropout_seed: Optional[int] = None,
) -> Tuple[np.ndarray, ForwardCache]:
    """Run the network on a Luma input.

    Args:
        w: Network parameters.
        cfg: Architecture matching ``w``.
        lr_input: A Luma ImageBuffer, a (1, H, W) array, or an (N, 1, H, W) batch.
        training: Apply inverted dropout (keep probability
            ``cfg.dropout_keep``) to every feature-layer output.
        dropout_seed: Seed of the dropout masks; identical seeds give
            identical masks.

    Returns:
        The (1, S*H, S*W) or (N, 1, S*H, S*W) output, unclamped, and the
        cache needed by ``backward``.

    Raises:
        InvalidArgumentError: If the input is not single-channel or the
            weights do not match ``cfg``.
        InvalidStateError: If the output is not finite.
    """
    x, squeeze = _as_network_input(lr_input)
    check_weights(w, cfg)
    keep = cfg.dropout_keep if training else 1.0
    rng = np.random.default_rng(dropout_seed) if keep < 1.0 else None
    steps: Dict[str, _Step] = {}

    def unit(name: str, h: np.ndarray) -> np.ndarray:
        pre = conv2d(h, w[f"{name}.kernel"], w[f"{name}.bias"])
        steps[name] = _Step(h, pre)
        return activate(pre, cfg.activator, w.get(f"{name}.slope"))

    h = x.astype(w.dtype)
    features = []
    for i in range(len(feature_filters(cfg))):
        name = f"feature.{i}"
        h, mask = dropout(unit(name, h), keep, rng)
        steps[name].mask = mask
        features.append(h)
    concat = np.concatenate(features, axis=1)

    a1 = unit("recon.a1", concat)
    b2 = unit("recon.b2", unit("recon.b1", concat))
    joined = np.concatenate([a1, b2], axis=1)
    shuffled = conv2d(joined, w["recon.l.kernel"], w["recon.l.bias"])
    steps["recon.l"] = _Step(joined, shuffled)

    out = depth_to_space(shuffled, cfg.scale) + upsample_array(x, cfg.scale)
    if not np.all(np.isfinite(out)):
        raise InvalidStateError("network produced non-finite values")
    cache = ForwardCache(
        token=w.token,
        training=training,
        squeeze=squeeze,
        output_shape=out.shape,
        steps=steps,
    )
    return (out[0] if squeeze else out), cache


def backward(
    w: ModelWeights, cfg: ModelConfig, cache: ForwardCache, out_grad: np.ndarray
) -> Gradients:
    """Reverse-mode gradients of a training forward pass.

    The bicubic residual branch has no parameters and receives no gradient.

    Returns:
        Gradients keyed and ordered like ``w``.

    Raises:
        InvalidStateError: If the cache came from other weights or from an
            inference pass.
        InvalidArgumentError: If ``out_grad`` does not match the output shape.
    """
    if cache.token != w.token:
        raise InvalidStateError("forward cache was produced by different weights")
    if not cache.training:
        raise InvalidStateError("backward needs a cache from a training forward pass")
    g = np.asarray(out_grad)
    if cache.squeeze:
        g = g[np.newaxis]
    if g.shape != cache.output_shape:
        raise InvalidArgumentError(
            f"output gradient shape {g.shape} does not match output {cache.output_shape}"
        )
    steps = cache.steps
    grads: Gradients = {}

    def unit_backward(name: str, grad_act: np.ndarray) -> np.ndarray:
        step = steps[name]
        grad_pre, grad_slope = activate_backward(
            step.pre, cfg.activator, w.get(f"{name}.slope"), grad_act
        )
        if grad_slope is not None:
            grads[f"{name}.slope"] = grad_slope
        grad_in, grads[f"{name}.kernel"], grads[f"{name}.bias"] = conv2d_backward(
            step.input, w[f"{name}.kernel"], grad_pre
        )
        return grad_in

    grad_shuffled = space_to_depth(g.astype(w.dtype), cfg.scale)
    grad_joined, grads["recon.l.kernel"], grads["recon.l.bias"] = conv2d_backward(
        steps["recon.l"].input, w["recon.l.kernel"], grad_shuffled
    )
    split = cfg.recon_a1
    grad_concat = unit_backward("recon.a1", grad_joined[:, :split])
    grad_b1 = unit_backward("recon.b2", grad_joined[:, split:])
    grad_concat = grad_concat + unit_backward("recon.b1", grad_b1)

    bounds = np.cumsum([0] + feature_filters(cfg))
    carry = None
    for i in reversed(range(len(bounds) - 1)):
        name = f"feature.{i}"
        grad_act = grad_concat[:, bounds[i] : bounds[i + 1]]
        if carry is not None:
            grad_act = grad_act + carry
        if steps[name].mask is not None:
            grad_act = grad_act * steps[name].mask
        carry = unit_backward(name, grad_act)

    return {name: grads[name] for name in w.names}


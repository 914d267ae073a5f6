"""text-superres data models.

This module provides the records shared across the package: images and
patches, degradation and network settings, and evaluation results.
"""

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from text_superres.exceptions import InvalidArgumentError


class Colorspace(str, Enum):
    """Colorspace tag of an ImageBuffer."""

    RGB = "RGB"
    YCBCR = "YCbCr"
    LUMA = "Luma"


class BlurKind(str, Enum):
    """Point spread function family."""

    MOTION = "motion"
    DEFOCUS = "defocus"
    NONE = "none"


class Activator(str, Enum):
    """Activation function of the feature and reconstruction layers."""

    PRELU = "prelu"
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    SIGMOID = "sigmoid"
    TANH = "tanh"
    SELU = "selu"


class TrainMode(str, Enum):
    """Training pipeline: super-resolution only, or joint deblurring."""

    ST = "st"
    SDT = "sdt"


class Command(str, Enum):
    """CLI subcommands recorded in run manifests."""

    DEGRADE = "degrade"
    TRAIN = "train"
    INFER = "infer"
    EVAL_IQA = "eval-iqa"
    EVAL_OCR = "eval-ocr"
    GRADCHECK = "gradcheck"


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """Planar floating-point raster.

    ``data`` has shape (channels, height, width) and holds samples in [0, 1].
    The array is copied on construction and made read-only.
    """

    data: np.ndarray
    colorspace: Colorspace

    def __post_init__(self):
        colorspace = Colorspace(self.colorspace)
        data = np.array(self.data, dtype=np.float64)
        if data.ndim == 2:
            data = data[np.newaxis]
        if data.ndim != 3:
            raise InvalidArgumentError(
                f"image data must be (channels, height, width), got shape {data.shape}"
            )
        channels, height, width = data.shape
        if channels not in (1, 3):
            raise InvalidArgumentError(f"image must have 1 or 3 channels, got {channels}")
        if (channels == 1) != (colorspace is Colorspace.LUMA):
            raise InvalidArgumentError(
                f"{colorspace.value} image cannot have {channels} channel(s)"
            )
        if height < 1 or width < 1:
            raise InvalidArgumentError("image dimensions must be positive")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("image samples must be finite")
        if data.min() < 0.0 or data.max() > 1.0:
            raise InvalidArgumentError("image samples must lie in [0, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "colorspace", colorspace)

    @classmethod
    def luma(cls, plane: np.ndarray) -> "ImageBuffer":
        """Wrap a 2-D array as a Luma image."""
        return cls(np.asarray(plane)[np.newaxis], Colorspace.LUMA)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def size(self) -> Tuple[int, int]:
        """(width, height) in pixels."""
        return self.width, self.height

    def plane(self, index: int = 0) -> np.ndarray:
        """Return one channel as a read-only 2-D view."""
        return self.data[index]


@dataclass(frozen=True, eq=False)
class PatchPair:
    """Aligned low-resolution input patch and high-resolution target patch."""

    lr: ImageBuffer
    hr: ImageBuffer
    origin: Tuple[int, int]

    @property
    def scale(self) -> int:
        return self.hr.width // self.lr.width


@dataclass(frozen=True, eq=False)
class BlurKernel:
    """Normalized, nonnegative, odd-sized square point spread function."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64)
        if taps.ndim != 2 or taps.shape[0] != taps.shape[1]:
            raise InvalidArgumentError(f"blur kernel must be square, got shape {taps.shape}")
        if taps.shape[0] % 2 == 0:
            raise InvalidArgumentError(f"blur kernel size must be odd, got {taps.shape[0]}")
        if not np.all(np.isfinite(taps)) or taps.min() < 0.0:
            raise InvalidArgumentError("blur kernel taps must be finite and nonnegative")
        if abs(taps.sum() - 1.0) > 1e-9:
            raise InvalidArgumentError(f"blur kernel taps sum to {taps.sum()}, not 1")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def size(self) -> int:
        return self.taps.shape[0]


@dataclass(frozen=True)
class DegradeConfig:
    """Blur family, its parameters, and the downscale factor."""

    kind: BlurKind = BlurKind.NONE
    length: float = 1.0
    angle: float = 0.0
    radius: float = 0.0
    scale: int = 2
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", BlurKind(self.kind))
        if self.scale not in (1, 2, 4):
            raise InvalidArgumentError(f"scale must be 1, 2 or 4, got {self.scale}")
        if self.length < 0 or self.radius < 0:
            raise InvalidArgumentError("blur length and radius must be nonnegative")
        if self.length < 1:
            raise InvalidArgumentError(f"motion length must be at least 1, got {self.length}")


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters.

    ``filters`` pins the feature-extraction schedule explicitly; when it is
    None the schedule is generated from first/last filters and gamma.
    """

    scale: int = 2
    feature_layers: int = 8
    first_filters: int = 196
    last_filters: int = 32
    filter_decay_gamma: float = 1.2
    activator: Activator = Activator.PRELU
    recon_a1: int = 64
    recon_b1: int = 32
    recon_b2: int = 32
    dropout_keep: float = 0.8
    filters: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "activator", Activator(self.activator))
        if self.scale not in (2, 4):
            raise InvalidArgumentError(f"model scale must be 2 or 4, got {self.scale}")
        if self.feature_layers < 2:
            raise InvalidArgumentError("at least two feature layers are required")
        if not self.first_filters >= self.last_filters >= 1:
            raise InvalidArgumentError("filter counts must satisfy first >= last >= 1")
        if self.filter_decay_gamma <= 0:
            raise InvalidArgumentError("filter decay gamma must be positive")
        if not 0.0 < self.dropout_keep <= 1.0:
            raise InvalidArgumentError("dropout keep probability must be in (0, 1]")
        if min(self.recon_a1, self.recon_b1, self.recon_b2) < 1:
            raise InvalidArgumentError("reconstruction filter counts must be positive")
        if self.filters is not None:
            filters = tuple(int(f) for f in self.filters)
            if len(filters) != self.feature_layers:
                raise InvalidArgumentError(
                    f"{len(filters)} filter counts given for {self.feature_layers} layers"
                )
            if min(filters) < 1 or any(a < b for a, b in zip(filters, filters[1:])):
                raise InvalidArgumentError(
                    f"filter schedule must be positive and non-increasing: {list(filters)}"
                )
            object.__setattr__(self, "filters", filters)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["activator"] = self.activator.value
        data["filters"] = list(self.filters) if self.filters is not None else None
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelConfig":
        try:
            return cls(**data)
        except InvalidArgumentError:
            raise
        except (TypeError, ValueError) as e:
            raise InvalidArgumentError(f"invalid model configuration: {e}") from e


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and loop settings."""

    mode: TrainMode = TrainMode.SDT
    scale: int = 2
    batch: int = 20
    patch: int = 32
    lr: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    steps: int = 1000
    seed: int = 0
    dropout_keep: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "mode", TrainMode(self.mode))
        if self.scale not in (2, 4):
            raise InvalidArgumentError(f"training scale must be 2 or 4, got {self.scale}")
        if self.batch < 1:
            raise InvalidArgumentError("batch size must be at least 1")
        if self.patch < 1:
            raise InvalidArgumentError("patch size must be at least 1")
        if self.lr <= 0:
            raise InvalidArgumentError("learning rate must be positive")
        if self.steps < 1:
            raise InvalidArgumentError("at least one training step is required")
        if not 0.0 < self.dropout_keep <= 1.0:
            raise InvalidArgumentError("dropout keep probability must be in (0, 1]")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise InvalidArgumentError("Adam betas must lie in [0, 1)")


@dataclass(frozen=True)
class IqaReport:
    """Full-reference quality of one image pair."""

    psnr: float
    ssim: float
    ifc: float
    vif: float

    def __post_init__(self):
        for name in ("ssim", "ifc", "vif"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if math.isnan(self.psnr) or self.psnr == -math.inf:
            raise InvalidArgumentError("psnr must be finite or +inf")


@dataclass(frozen=True)
class OcrComparison:
    """OCR output of a restored image compared with the reference OCR output."""

    reference_text: str
    candidate_text: str
    levenshtein_ratio: float
    char_cosine: float


@dataclass(frozen=True)
class RunManifest:
    """Resolved parameters of one CLI run, written next to its outputs."""

    command: Command
    config: Dict[str, Any]
    seed: Optional[int]
    tool_version: str

    def __post_init__(self):
        object.__setattr__(self, "command", Command(self.command))

    def to_json(self) -> str:
        data = {
            "command": self.command.value,
            "config": self.config,
            "seed": self.seed,
            "tool_version": self.tool_version,
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        try:
            return cls(
                command=data["command"],
                config=dict(data["config"]),
                seed=data.get("seed"),
                tool_version=data["tool_version"],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgumentError(f"invalid run manifest: {e}") from e

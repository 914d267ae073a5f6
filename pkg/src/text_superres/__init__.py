"""text-superres: joint super-resolution and deblurring of text images.

The library layers are usable without the CLI:

- ``imagecore``: images, colour conversion, bicubic resampling, patches, PNG I/O
- ``degrade``: synthetic motion/defocus degradation of training pairs
- ``layers`` and ``network``: the skip-connection network, forward and backward
- ``train``: loss, Adam, the training loop and the gradient check
- ``iqa`` and ``ocreval``: image quality and OCR fidelity metrics
- ``modelfile`` and ``pipeline``: model persistence and inference
"""

from text_superres.exceptions import (
    ExternalToolError,
    ExternalToolFailureError,
    ExternalToolNotFoundError,
    ImageIOError,
    InvalidArgumentError,
    InvalidStateError,
    ModelCorruptionError,
    ModelFileError,
    ModelFormatError,
    ModelIOError,
    ModelVersionError,
    OcrDecodeError,
    TextSRError,
)
from text_superres.modelfile import load_model, save_model
from text_superres.models import (
    Activator,
    BlurKernel,
    BlurKind,
    Colorspace,
    DegradeConfig,
    ImageBuffer,
    IqaReport,
    ModelConfig,
    OcrComparison,
    PatchPair,
    RunManifest,
    TrainConfig,
    TrainMode,
)
from text_superres.network import ModelWeights, forward, init_model, preset_config
from text_superres.pipeline import SuperResolver, bicubic_upscale, infer
from text_superres.version import __version__

__all__ = [
    "Activator",
    "BlurKernel",
    "BlurKind",
    "Colorspace",
    "DegradeConfig",
    "ExternalToolError",
    "ExternalToolFailureError",
    "ExternalToolNotFoundError",
    "ImageBuffer",
    "ImageIOError",
    "InvalidArgumentError",
    "InvalidStateError",
    "IqaReport",
    "ModelConfig",
    "ModelCorruptionError",
    "ModelFileError",
    "ModelFormatError",
    "ModelIOError",
    "ModelVersionError",
    "ModelWeights",
    "OcrComparison",
    "OcrDecodeError",
    "PatchPair",
    "RunManifest",
    "SuperResolver",
    "TextSRError",
    "TrainConfig",
    "TrainMode",
    "__version__",
    "bicubic_upscale",
    "forward",
    "infer",
    "init_model",
    "load_model",
    "preset_config",
    "save_model",
]

"""Model file persistence.

Layout (all integers little-endian)::

    [4 bytes: magic "SDTD"]
    [4 bytes: format version, uint32]
    [4 bytes: header length, uint32]
    [header: UTF-8 JSON {"config": ModelConfig, "layers": [{"name", "shape"}, ...]}]
    [float32 blobs in manifest order, row-major]

The header is written with sorted keys and no whitespace, so saving the
same model twice yields identical bytes.
"""

import json
import logging
import os
import struct
import tempfile
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from text_superres.exceptions import (
    InvalidArgumentError,
    ModelCorruptionError,
    ModelFormatError,
    ModelIOError,
    ModelVersionError,
)
from text_superres.models import ModelConfig
from text_superres.network import ModelWeights, check_weights, parameter_shapes

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

MAGIC = b"SDTD"
FORMAT_VERSION = 1
_PREAMBLE = struct.Struct("<4sII")
_BLOB_DTYPE = np.dtype("<f4")


def encode_model(w: ModelWeights, cfg: ModelConfig) -> bytes:
    """Serialize weights and configuration to the model file layout.

    Raises:
        InvalidArgumentError: If the weights do not match ``cfg``.
    """
    check_weights(w, cfg)
    header = {
        "config": cfg.to_dict(),
        "layers": [{"name": n, "shape": list(a.shape)} for n, a in w.params.items()],
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    parts = [_PREAMBLE.pack(MAGIC, FORMAT_VERSION, len(header_bytes)), header_bytes]
    for value in w.params.values():
        parts.append(np.ascontiguousarray(value, dtype=_BLOB_DTYPE).tobytes())
    return b"".join(parts)


def _parse_header(raw: bytes) -> Tuple[ModelConfig, list]:
    try:
        header: Dict[str, Any] = json.loads(raw.decode("utf-8"))
        config = header["config"]
        layers = [(str(item["name"]), tuple(int(d) for d in item["shape"])) for item in header["layers"]]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ModelCorruptionError(f"damaged model header: {e}") from e
    if not isinstance(config, dict):
        raise ModelCorruptionError("damaged model header: config is not an object")
    try:
        cfg = ModelConfig.from_dict(config)
    except InvalidArgumentError as e:
        raise ModelFormatError(f"model header holds an invalid configuration: {e}") from e
    return cfg, layers


def decode_model(data: bytes) -> Tuple[ModelWeights, ModelConfig]:
    """Parse model file bytes.

    Raises:
        ModelFormatError: On a wrong magic or a manifest that disagrees with
            the embedded configuration.
        ModelVersionError: On an unsupported format version.
        ModelCorruptionError: On a truncated or oversized blob or a damaged header.
    """
    if len(data) < 4 or data[:4] != MAGIC:
        raise ModelFormatError(
            f"not a model file: expected magic {MAGIC.decode()!r}, found {data[:4]!r}"
        )
    if len(data) < _PREAMBLE.size:
        raise ModelCorruptionError("model file is truncated inside its preamble")
    _, version, header_length = _PREAMBLE.unpack_from(data)
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"unsupported model format version {version} (supported: {FORMAT_VERSION})"
        )
    offset = _PREAMBLE.size
    if len(data) < offset + header_length:
        raise ModelCorruptionError("model file is truncated inside its header")
    cfg, layers = _parse_header(data[offset : offset + header_length])
    offset += header_length

    expected = list(parameter_shapes(cfg).items())
    if layers != expected:
        raise ModelFormatError("layer manifest does not match the embedded configuration")

    params = {}
    for name, shape in layers:
        count = int(np.prod(shape))
        end = offset + count * _BLOB_DTYPE.itemsize
        if end > len(data):
            raise ModelCorruptionError(f"model file is truncated inside blob {name}")
        blob = np.frombuffer(data, dtype=_BLOB_DTYPE, count=count, offset=offset)
        params[name] = blob.reshape(shape).astype(np.float32)
        offset = end
    if offset != len(data):
        raise ModelCorruptionError(f"{len(data) - offset} unexpected bytes after the last blob")
    return ModelWeights(params), cfg


def save_model(w: ModelWeights, cfg: ModelConfig, path: PathLike) -> Path:
    """Write a model file durably.

    The bytes go to a temporary file in the target directory, are fsynced,
    and replace ``path`` only when complete.

    Raises:
        InvalidArgumentError: If the weights do not match ``cfg``.
        ModelIOError: If the file cannot be written.
    """
    path = Path(path)
    data = encode_model(w, cfg)
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile(
            dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
        ) as tmp:
            tmp_name = tmp.name
            tmp.write(data)
            tmp.flush()
            os.fsync(tmp.fileno())
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise ModelIOError(str(e), str(path)) from e
    logger.debug("Saved %d parameters to %s (%d bytes)", w.parameter_count, path, len(data))
    return path


def load_model(path: PathLike) -> Tuple[ModelWeights, ModelConfig]:
    """Read and validate a model file.

    Raises:
        ModelIOError: If the file cannot be read.
        ModelFileError: If the contents are invalid (see ``decode_model``).
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ModelIOError(str(e), str(path)) from e
    weights, cfg = decode_model(data)
    logger.debug("Loaded %d parameters from %s", weights.parameter_count, path)
    return weights, cfg

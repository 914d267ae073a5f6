"""Exceptions for text-superres."""

from typing import Optional


class TextSRError(Exception):
    """Base exception for all text-superres errors."""

    exit_code = 1

    def __init__(self, message: str, exit_code: Optional[int] = None):
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(message)


class InvalidArgumentError(TextSRError, ValueError):
    """Raised when an operation is called outside its contract."""

    exit_code = 2


class InvalidStateError(TextSRError):
    """Raised when a forward cache does not belong to the given weights."""

    exit_code = 2


class ImageIOError(TextSRError):
    """Raised when an image cannot be read or written."""

    exit_code = 3


class ModelIOError(TextSRError):
    """Raised when a model file cannot be read or written."""

    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ModelFileError(TextSRError):
    """Base class for problems with the contents of a model file."""

    exit_code = 4


class ModelFormatError(ModelFileError):
    """Raised when a file is not a model file or its manifest is inconsistent."""

    pass


class ModelVersionError(ModelFileError):
    """Raised when a model file uses an unsupported format version."""

    pass


class ModelCorruptionError(ModelFileError):
    """Raised when a model file is truncated or its header is damaged."""

    pass


class ExternalToolError(TextSRError):
    """Base class for failures of an external OCR engine."""

    exit_code = 5


class ExternalToolNotFoundError(ExternalToolError):
    """Raised when the engine executable cannot be found."""

    pass


class ExternalToolFailureError(ExternalToolError):
    """Raised when the engine exits with a nonzero status."""

    def __init__(self, message: str, returncode: int, stderr: str = ""):
        self.returncode = returncode
        self.stderr = stderr
        detail = f"{message} (exit {returncode})"
        if stderr:
            detail = f"{detail}: {stderr.strip()}"
        super().__init__(detail)


class OcrDecodeError(ExternalToolError):
    """Raised when the engine output is not valid UTF-8."""

    pass

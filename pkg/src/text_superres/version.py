"""Version management module for text-superres"""

import importlib.metadata
import logging
import re
from pathlib import Path

logger = logging.getLogger(__name__)

_DEFAULT_VERSION = "0.1.0"


def _read_version_from_pyproject() -> str:
    """
    Read version directly from pyproject.toml.

    Returns:
        str: The version string from pyproject.toml or a default if not found.
    """
    try:
        # src/text_superres/version.py -> project root
        project_root = Path(__file__).resolve().parents[2]
        pyproject_path = project_root / "pyproject.toml"
        logger.debug("Looking for pyproject.toml at %s", pyproject_path)

        if not pyproject_path.exists():
            logger.debug("pyproject.toml not found at %s", pyproject_path)
            return _DEFAULT_VERSION

        with open(pyproject_path, "r", encoding="utf-8") as f:
            version_match = re.search(r'version\s*=\s*"([^"]+)"', f.read())
            if not version_match:
                logger.warning("Could not find version in pyproject.toml")
                return _DEFAULT_VERSION
            return version_match.group(1)
    except OSError as e:
        logger.warning("Error reading version from pyproject.toml: %s", e)
        return _DEFAULT_VERSION


_VERSION = _read_version_from_pyproject()


def get_version() -> str:
    """
    Get the current version of the package.

    Prefers the installed distribution metadata and falls back to the
    version read from pyproject.toml when the package is not installed.

    Returns:
        str: The current version string.
    """
    try:
        return importlib.metadata.version("text-superres")
    except importlib.metadata.PackageNotFoundError:
        logger.debug("Package not installed, using pyproject version")
        return _VERSION


__version__ = get_version()

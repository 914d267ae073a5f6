"""Unit tests for the version module."""

import importlib.metadata
import os
import re
from unittest.mock import patch

from text_superres.version import _VERSION, __version__, get_version


class TestVersion:
    """Test suite for the version module."""

    def test_get_version_installed(self):
        """Test get_version when package is installed."""
        with patch("importlib.metadata.version", return_value="1.2.3") as mock_version:
            version = get_version()

            mock_version.assert_called_once_with("text-superres")
            assert version == "1.2.3"

    def test_get_version_not_installed(self):
        """Test get_version when package is not installed."""
        with patch("importlib.metadata.version") as mock_version:
            mock_version.side_effect = importlib.metadata.PackageNotFoundError("text-superres")

            version = get_version()

            mock_version.assert_called_once_with("text-superres")
            assert version == _VERSION

    def test_version_constant(self):
        """Test that __version__ is a semantic version string."""
        assert isinstance(__version__, str)
        assert re.match(r"^\d+\.\d+\.\d+", __version__)

    def test_version_consistency(self):
        """Test that version in pyproject.toml matches version in version.py."""
        current_dir = os.path.dirname(os.path.abspath(__file__))
        project_root = os.path.abspath(os.path.join(current_dir, "../.."))

        with open(os.path.join(project_root, "pyproject.toml"), "r", encoding="utf-8") as f:
            version_match = re.search(r'version\s*=\s*"([^"]+)"', f.read())
        assert version_match, "Could not find version in pyproject.toml"

        assert version_match.group(1) == _VERSION, (
            f"Version mismatch: pyproject.toml has {version_match.group(1)}, "
            f"but version.py _VERSION is {_VERSION}"
        )

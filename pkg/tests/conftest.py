"""Global pytest configuration for text-superres tests."""

import numpy as np
import pytest

from fixtures.test_data import (
    HELLO_ENGINE_CODE,
    SIDECAR_ENGINE_CODE,
    python_engine,
    rgb_text_image,
    smooth_image,
    text_image,
)
from text_superres.network import preset_config


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def sample_text_image():
    """96x64 Luma text page."""
    return text_image(96, 64, seed=0)


@pytest.fixture
def sample_rgb_image():
    """96x64 RGB text page."""
    return rgb_text_image(96, 64, seed=0)


@pytest.fixture
def sample_smooth_image():
    """64x48 smooth Luma pattern."""
    return smooth_image(64, 48)


@pytest.fixture
def tiny_config():
    """The 2-layer [4, 3] architecture at scale 2."""
    return preset_config("tiny", scale=2)


@pytest.fixture
def hello_engine():
    """OCR engine template that always prints 'hello'."""
    return python_engine(HELLO_ENGINE_CODE)


@pytest.fixture
def sidecar_engine():
    """OCR engine template that returns the text stored beside each image."""
    return python_engine(SIDECAR_ENGINE_CODE)


@pytest.fixture
def isolated_config(tmp_path, monkeypatch):
    """Point the CLI's default config file at an empty temporary location."""
    config_file = tmp_path / "config" / "config.json"
    monkeypatch.setattr("text_superres.cli.DEFAULT_CONFIG_FILE", config_file)
    return config_file

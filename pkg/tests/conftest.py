"""
Pytest configuration file.

This file ensures that the project root is in the Python path,
allowing tests to import the catp package, and provides shared fixtures.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Keep tests independent of a developer's .env
for variable in ("CATP_STRICT", "CATP_TOLERANCE", "CATP_LOG_LEVEL", "CATP_FIXTURE_DIR"):
    os.environ.pop(variable, None)

from catp import attnio, toymodel  # noqa: E402
from catp.domain.tensors import AttnTensor  # noqa: E402

WORKED_ROWS = [
    [0.8, 0.1, 0.1],
    [0.5, 0.35, 0.15],
    [0.4, 0.3, 0.3],
]


@pytest.fixture
def worked_tensor() -> AttnTensor:
    """The 1x1x3x3 voting example: importance [2, 4, 3]."""
    return AttnTensor(data=[[WORKED_ROWS]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture
def seed7_config() -> toymodel.ToyConfig:
    return toymodel.ToyConfig(seed=7, layers=2, heads=2, n_query=4, n_image=5, dim=8)


@pytest.fixture
def seed7_fixture(tmp_path, seed7_config):
    """Seed-7 toy sample written to disk; returns the three paths."""
    cross, self_attn, emb = toymodel.generate(seed7_config)
    paths = {
        "cross": tmp_path / "cross.attn",
        "self": tmp_path / "self.attn",
        "emb": tmp_path / "emb.attn",
    }
    attnio.write_tensor(cross, paths["cross"])
    attnio.write_tensor(self_attn, paths["self"])
    attnio.write_tensor(emb, paths["emb"])
    return paths

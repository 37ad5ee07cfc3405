"""Shared pytest setup: import paths and a throwaway log directory"""

import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

APP_DIR = Path(__file__).parent.parent

os.environ.setdefault('ENTSIM_LOG_DIR', tempfile.mkdtemp(prefix='entsim-logs-'))
for sub in ('', 'src', 'modules'):
    path = str(APP_DIR / sub) if sub else str(APP_DIR)
    if path not in sys.path:
        sys.path.insert(0, path)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_density_matrix(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


# Create the shared logger before any test swaps sys.stderr
from logger import get_logger  # noqa: E402

get_logger()

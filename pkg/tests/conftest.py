from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

SWAP = np.array([[0, 1], [1, 0]], dtype=np.complex128)
E11 = np.diag([1.0, 0.0]).astype(np.complex128)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def swap_sigma():
    from distvar.pencilvariety import SigmaData

    return SigmaData((E11, E11), (SWAP, SWAP))


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)

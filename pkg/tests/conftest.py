from pathlib import Path

import numpy as np
import pytest

from gadgetopt.pauli import read_target

DEMOS = Path(__file__).resolve().parent.parent / "demos"


@pytest.fixture(scope="session")
def pair_target():
    return read_target(DEMOS / "pair.ham", compact=True)


@pytest.fixture(scope="session")
def single_target():
    return read_target(DEMOS / "single3.ham", compact=True)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def low_ancilla_blocks(dense):
    """Low-space indices grouped by ancilla pattern: ``{pattern: positions in L_-}``."""
    n_sys = dense.model.n_sys
    idx = np.flatnonzero(dense.low)
    groups = {}
    for pos, g in enumerate(idx):
        groups.setdefault(int(g) >> n_sys, []).append(pos)
    return {k: np.array(v) for k, v in groups.items()}

from pathlib import Path

import numpy as np
import pytest

from esn_readouts.harness import data_dir


def jv_root():
    return data_dir() / "japanese_vowels"


def have_jv():
    root = jv_root()
    return all((root / n).exists() for n in ("ae.train", "ae.test", "size_ae.test"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def jv_paths():
    if not have_jv():
        pytest.skip(f"Japanese vowels files not found under {jv_root()}")
    root = jv_root()
    return Path(root / "ae.train"), Path(root / "ae.test")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

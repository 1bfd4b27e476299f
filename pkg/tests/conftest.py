import numpy as np
import pytest

from seasontrend.encoder import EncoderConfig, init_params

# criterion id -> (passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_cfg():
    return EncoderConfig(m=1, h=16, hidden=8, blocks=2, d=8)


@pytest.fixture
def tiny_params(tiny_cfg):
    return init_params(tiny_cfg, seed=0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.rstrip("abcdefghijklmnopqrstuvwxyz_")), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<4} {'PASS' if ok else 'FAIL'}  {detail}")

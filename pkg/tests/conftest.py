import numpy as np
import pytest
from hypothesis import settings

from thermorecycle.protocol import default_bath

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def qubit_bath():
    """Single-qubit bath with a 5 GHz gap at 43 mK."""
    return default_bath()


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, seconds, detail = ACCEPTANCE[n]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{n:2d}] {status}  {title}  ({seconds:.2f} s)  {detail}")

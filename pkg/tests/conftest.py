import functools

import numpy as np
import pytest

from trigshear.cartoon import fig1_cartoon, single_order_cartoon
from trigshear.transform import required_kmax, resolution_for, spectrum_from_function

# fixed seed for every randomised probe in the suite
SEED = 20240611


@functools.lru_cache(maxsize=None)
def cached_spectrum(name: str, j: int, oversample: int = 8):
    """Cropped spectrum of a named cartoon; j = 10 entries are ~120 MB each."""
    f = fig1_cartoon() if name == "fig1" else single_order_cartoon(int(name[-1]))
    N = resolution_for(j, oversample)
    return spectrum_from_function(f, N, kmax=min(N // 2, required_kmax(j)))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def spectra():
    return cached_spectrum


# one "PASS/FAIL criterion N: ..." line per acceptance check, repeated in the run summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

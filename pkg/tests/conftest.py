import numpy as np
import pytest
from hypothesis import settings, strategies as st

from cspr.sequence_io import Sequence

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

dna = st.text(alphabet="ACGT", min_size=2, max_size=60)
dna4 = st.text(alphabet="ACGT", min_size=4, max_size=60)


def random_sequence(n, seed, id="rand", topology="circular"):
    rng = np.random.default_rng(seed)
    return Sequence.from_codes(id, rng.integers(0, 4, size=n), topology)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number, passed, detail):
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])

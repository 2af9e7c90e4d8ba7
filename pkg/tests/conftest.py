
import numpy as np
import pytest

from gsdesign.encoding import DescriptorTable, toy_table
from gsdesign.kernel import GSParams
from gsdesign.regression import TrainingSet, fit

SYMBOLS = "ABCDEFGH"


def random_table(rng, n_sym, d=2):
    return DescriptorTable(tuple(SYMBOLS[:n_sym]), rng.normal(size=(n_sym, d)))


def random_seqs(rng, n_sym, m, lo=3, hi=8):
    return [tuple(int(c) for c in rng.integers(0, n_sym, size=rng.integers(lo, hi + 1)))
            for _ in range(m)]


def random_instance(rng, n_sym=None, l=None, k=None, m=None, normalized=True, lam=0.1,
                    sigma_p=None, sigma_c=None):
    """A random (model, l) pair in the small-instance family used throughout."""
    n_sym = n_sym or int(rng.choice([2, 4]))
    l = l or int(rng.choice([4, 5, 6]))
    k = k or int(rng.choice([1, 2, 3]))
    m = m or int(rng.choice([3, 8]))
    sigma_p = sigma_p if sigma_p is not None else float(rng.choice([0.5, 1.0, 2.0]))
    sigma_c = sigma_c if sigma_c is not None else float(rng.choice([0.5, 1.0, 2.0]))
    table = random_table(rng, n_sym)
    params = GSParams(k, sigma_p, sigma_c)
    train = TrainingSet(random_seqs(rng, n_sym, m), rng.normal(size=m))
    return fit(train, params, lam, normalized, table), l


@pytest.fixture
def toy():
    return toy_table()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list = []


def report(number: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from loewnerkit import DriverSet, random_polynomial_drivers

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


def zero_drivers(K=4, G=10, T=1.0):
    return DriverSet.zero(G, T, K)


def single_driver(n, coeffs=(0, 1), G=20, T=1.0, x0=(0,)):
    xs = [None] * n
    xs[n - 1] = list(coeffs)
    return DriverSet.from_polynomials(list(x0), xs, G, T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_ds(rng):
    return random_polynomial_drivers(rng, 4, 40, 1.0)


@pytest.fixture(scope="session")
def oracle_values():
    d = json.loads((DATA / "oracle_values.json").read_text())
    xs = [[complex(*v) for v in p] for p in d["xs"]]
    ds = DriverSet.from_polynomials(d["x0"], xs, d["G"], d["T"])
    c = np.array([complex(*v) for v in d["taylor_c"]])
    b = np.array([[complex(*v) for v in row] for row in d["grunsky_b"]])
    return ds, c, b


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

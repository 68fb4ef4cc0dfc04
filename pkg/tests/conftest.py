"""Shared naive oracles for the test suite.

Every pair functional here is written as a literal double loop over ordered
pairs, independent of the library's compressed implementations, so the two
can be compared on small inputs.
"""

import math

import numpy as np
import pytest

from rotcon import Constellation


def naive_pair_sum(pts: np.ndarray, n0: float) -> float:
    s = 0.0
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j:
                continue
            s += float(np.prod(1.0 / (1.0 + (pts[i] - pts[j]) ** 2 / (8.0 * n0))))
    return s


def naive_cutoff_rate(pts: np.ndarray, q: int, n0: float) -> float:
    return q - math.log2(1.0 + naive_pair_sum(pts, n0) / 2.0**q)


def naive_local_cutoff_rate(pts: np.ndarray, q: int, r: float, n0: float) -> float:
    s = 0.0
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j:
                continue
            d = pts[i] - pts[j]
            if np.sum(d**2) <= r * r * (1 + 1e-12):
                s += float(np.prod(1.0 / (1.0 + d**2 / (8.0 * n0))))
    return q - math.log2(1.0 + s / 2.0**q)


def naive_diversity(pts: np.ndarray, r: float, tol: float = 1e-9) -> int:
    best = pts.shape[1]
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j:
                continue
            d = pts[i] - pts[j]
            if np.sum(d**2) <= r * r * (1 + 1e-12):
                best = min(best, int(np.sum(np.abs(d) > tol)))
    return best


def naive_min_product_distance(pts: np.ndarray, r: float, tol: float = 1e-9) -> float:
    best = math.inf
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j:
                continue
            d = pts[i] - pts[j]
            if np.sum(d**2) <= r * r * (1 + 1e-12):
                ad = np.abs(d)
                best = min(best, float(np.prod(np.where(ad > tol, ad, 1.0))))
    return best


def random_constellation(rng: np.random.Generator, m: int, n: int) -> Constellation:
    """m generic points in R^n (power-of-two m assumed by the caller)."""
    while True:
        pts = rng.normal(size=(m, n))
        if len({tuple(p) for p in pts}) == m:
            return Constellation(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# verdict lines accumulated by the acceptance tests; echoed after the run so
# they are visible even under output capture
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)

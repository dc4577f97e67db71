import numpy as np
import pytest

from binned_bosons import gram_uniform


def pytest_runtest_logreport(report):
    """Print one PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    if hasattr(report, "wasxfail"):
        status = "XFAIL (documented limitation)" if report.skipped else "XPASS"
    else:
        status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {report.nodeid.split('::')[-1]}: {status}")


@pytest.fixture
def hom_beamsplitter():
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@pytest.fixture
def ones3():
    return gram_uniform(3, 1.0)


def random_real_gram(rng, n=3):
    """Random real PSD Gram matrix with unit diagonal (random unit vectors)."""
    v = rng.standard_normal((n, n))
    v /= np.linalg.norm(v, axis=0)
    return v.T @ v


def naive_permanent(a):
    """Brute-force permutation-sum permanent, the independent oracle."""
    from itertools import permutations

    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    return sum(np.prod([a[i, p[i]] for i in range(n)]) for p in permutations(range(n)))

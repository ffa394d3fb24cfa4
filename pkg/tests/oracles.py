"""Independent reference computations used by the tests.

Nothing here imports the solver or sampler code paths it checks.
"""

import itertools
from fractions import Fraction

import numpy as np


def beta_moments_fraction(a, b):
    a, b = Fraction(a), Fraction(b)
    s = a + b
    return a / s, a * b / (s * s * (s + 1))


def naive_quadratic_form(alpha, cov):
    """a^T (C a) with explicit loops; zero terms included."""
    n = len(alpha)
    v = [0.0] * n
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += cov[i][j] * alpha[j]
        v[i] = acc
    total = 0.0
    for i in range(n):
        total += alpha[i] * v[i]
    return total


def brute_force_best(res, a, b, rho, theta, k):
    """Enumerate all 2^N bit vectors, keep size-k ones, rank by class then value.

    Returns (class, magnitude, indices) with class 0 = feasible risk,
    1 = quality deficit.
    """
    res = np.asarray(res, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    mean = a / (a + b)
    sd = np.sqrt(a * b / ((a + b) ** 2 * (a + b + 1)))
    scale = res * sd
    cov = np.asarray(rho) * np.outer(scale, scale)
    best = None
    for bits in itertools.product((0, 1), repeat=len(res)):
        if sum(bits) != k:
            continue
        x = np.array(bits, float)
        q = float(x @ (res * mean))
        if q < theta:
            key = (1, theta - q)
        else:
            key = (0, float(x @ cov @ x))
        idx = tuple(i for i, v in enumerate(bits) if v)
        if best is None or key < best[:2] or (key == best[:2] and idx < best[2]):
            best = (*key, idx)
    return best


def two_factor_correlation(rng, n, low=0.1):
    """Random PSD correlation matrix with all entries in [low, 1].

    rho = L L^T + D with nonnegative two-factor loadings; resampled until the
    smallest off-diagonal entry reaches ``low``.
    """
    while True:
        load = rng.uniform(0.2, 1.0, size=(n, 2))
        norms = np.linalg.norm(load, axis=1)
        load = load / np.maximum(norms, 1.0)[:, None] * rng.uniform(0.5, 1.0, size=(n, 1))
        m = load @ load.T
        np.fill_diagonal(m, 1.0)
        if m[~np.eye(n, dtype=bool)].min() >= low:
            return m

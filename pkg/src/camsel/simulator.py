"""
Monte-Carlo disruption sampling.

Availability probabilities p_i are drawn jointly through a Gaussian copula:
z = L g with g iid standard normal and L the Cholesky factor of the (repaired)
correlation matrix, then p_i = BetaQuantile(Phi(z_i); a_i, b_i). Marginals are
exactly Beta(a_i, b_i); rho is the copula's normal-correlation parameter, so
the Pearson correlation of the p's themselves comes out somewhat smaller.
Given p, each camera is up independently with probability p_i.

Each trial owns a generator derived from (seed, trial index), so trial t does
not depend on how many other trials run or in what order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import InvalidInputError
from .scenario import CorrelationMatrix, Scenario

__all__ = [
    "CopulaFactor",
    "TrialDraw",
    "draw_trial",
    "prepare_copula",
    "run_trials",
    "sample_outcomes",
    "sample_probabilities",
    "trial_rng",
]


@dataclass(frozen=True, eq=False)
class CopulaFactor:
    lower: np.ndarray
    repaired: np.ndarray
    repair_delta: float

    @property
    def n(self) -> int:
        return self.lower.shape[0]


@dataclass(frozen=True, eq=False)
class TrialDraw:
    probs: np.ndarray
    up: np.ndarray


def prepare_copula(rho: CorrelationMatrix) -> CopulaFactor:
    """Repair ``rho`` to PSD if needed and return its lower Cholesky factor."""
    if not isinstance(rho, CorrelationMatrix):
        rho = CorrelationMatrix(rho)
    fixed, delta = rho.repaired()
    n = fixed.shape[0]
    jitter = 0.0
    while True:
        try:
            lower = np.linalg.cholesky(fixed + jitter * np.eye(n))
            break
        except np.linalg.LinAlgError:
            if jitter >= 1e-10:
                lower = _psd_factor(fixed)
                break
            jitter = 1e-14 if jitter == 0.0 else jitter * 10
    lower.setflags(write=False)
    fixed.setflags(write=False)
    return CopulaFactor(lower, fixed, delta)


def _psd_factor(m: np.ndarray) -> np.ndarray:
    # pivoted fallback for singular matrices: LDL^T with zero pivots dropped
    n = m.shape[0]
    lower = np.zeros((n, n))
    for j in range(n):
        d = m[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= 1e-13:
            continue
        lower[j, j] = np.sqrt(d)
        lower[j + 1 :, j] = (m[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, split from ``seed`` by the trial counter."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def sample_probabilities(
    scenario: Scenario, factor: CopulaFactor, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Correlated Beta availability probabilities, shape (N,) or (size, N)."""
    n = scenario.n
    if factor.n != n:
        raise InvalidInputError(f"copula factor is for {factor.n} cameras, scenario has {n}")
    shape = (n,) if size is None else (size, n)
    g = rng.standard_normal(shape)
    z = g @ factor.lower.T
    u = special.ndtr(z)
    p = special.betaincinv(scenario.beta_a, scenario.beta_b, u)
    # keep the open interval even where Phi(z) rounds to 0 or 1
    tiny = np.finfo(float).tiny
    return np.clip(p, tiny, 1.0 - np.finfo(float).epsneg)


def sample_outcomes(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli up/down given the availability probabilities."""
    probs = np.asarray(probs, dtype=float)
    return rng.random(probs.shape) < probs


def draw_trial(
    scenario: Scenario, factor: CopulaFactor, rng: np.random.Generator, freeze_outcomes: bool = False
) -> TrialDraw:
    probs = sample_probabilities(scenario, factor, rng)
    if freeze_outcomes:
        up = probs >= 0.5
    else:
        up = sample_outcomes(probs, rng)
    return TrialDraw(probs, up)


def run_trials(
    scenario: Scenario,
    selection,
    model: Callable[[int], float],
    trials: int,
    seed: int,
    *,
    factor: CopulaFactor | None = None,
    freeze_outcomes: bool = False,
    workers: int | None = None,
) -> np.ndarray:
    """Delivered quality for each of ``trials`` independent disruption draws.

    ``model`` maps the bitmask of cameras that are both selected and up to a
    quality value. ``freeze_outcomes`` replaces the Bernoulli draw by
    up-iff-p>=0.5 for sensitivity studies.
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    sel = np.asarray(selection).astype(bool)
    if sel.shape != (scenario.n,):
        raise InvalidInputError(f"selection has length {sel.shape[0]}, scenario has {scenario.n} cameras")
    if factor is None:
        factor = prepare_copula(scenario.rho)
    weights = 1 << np.arange(scenario.n, dtype=np.int64)

    def one(t: int) -> float:
        draw = draw_trial(scenario, factor, trial_rng(seed, t), freeze_outcomes)
        mask = int(weights[sel & draw.up].sum())
        return float(model(mask))

    if workers is None or workers <= 1:
        values = [one(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, range(trials)))
    return np.array(values, dtype=float)

"""
Camera selection: objective, constraints, exact and genetic solvers, baselines.

A selection is a length-N 0/1 numpy vector. The problem solved is

    minimize    sum_i sum_j a_i a_j cov(R_i, R_j)
    subject to  sum_i a_i E[R_i] >= theta
                sum_i a_i <= psi

Fitness is class-ordered rather than a single scalar: any budget violation is
worse than any quality deficit, which is worse than any feasible risk. With
pixel-scale numbers a deficit (~1e6) would otherwise look better than a
feasible risk (~1e11).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CapacityError, InvalidInputError, InvalidParameterError
from .scenario import Scenario, covariance_matrix, expected_resolutions

__all__ = [
    "FitnessValue",
    "GAParams",
    "SolveResult",
    "as_selection",
    "best_over_budget",
    "enforce_psi",
    "exact_solver",
    "expected_quality",
    "fitness",
    "ga_solve",
    "objective_risk",
    "selected_indices",
    "selection_from_indices",
    "selection_mask",
    "traditional_select",
]

EXACT_SOLVER_MAX_N = 25

RISK, QUALITY_DEFICIT, INFEASIBLE_BUDGET = 0, 1, 2
_CLASS_NAMES = {RISK: "risk", QUALITY_DEFICIT: "quality-deficit", INFEASIBLE_BUDGET: "infeasible-budget"}


@dataclass(frozen=True, order=True)
class FitnessValue:
    """Totally ordered fitness; smaller is better.

    ``rank`` is the class (0 risk, 1 quality deficit, 2 budget violation) and
    ``magnitude`` orders within a class. For budget violations the magnitude
    is the number of cameras over budget.
    """

    rank: int
    magnitude: float

    @property
    def kind(self) -> str:
        return _CLASS_NAMES[self.rank]

    @property
    def feasible(self) -> bool:
        return self.rank == RISK

    def __str__(self) -> str:
        return f"{self.kind}:{self.magnitude:.6g}"


@dataclass(frozen=True)
class GAParams:
    population_size: int = 60
    max_generations: int = 150
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None means 1/N
    elitism_count: int = 2

    def __post_init__(self):
        if self.population_size < 2:
            raise InvalidParameterError(f"population_size must be >= 2, got {self.population_size}")
        if self.max_generations < 1:
            raise InvalidParameterError(f"max_generations must be >= 1, got {self.max_generations}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise InvalidParameterError(f"crossover_rate must be in [0, 1], got {self.crossover_rate}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise InvalidParameterError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not 0 <= self.elitism_count < self.population_size:
            raise InvalidParameterError(
                f"elitism_count must be in [0, population_size), got {self.elitism_count}"
            )

    def resolved_mutation_rate(self, n: int) -> float:
        return 1.0 / n if self.mutation_rate is None else self.mutation_rate


@dataclass(frozen=True, eq=False)
class SolveResult:
    selection: np.ndarray
    fitness: FitnessValue
    expected_quality: float
    objective_risk: float
    generations_used: int = 0
    method: str = ""

    @property
    def indices(self) -> tuple[int, ...]:
        return selected_indices(self.selection)


# -- selection vectors -------------------------------------------------------

def as_selection(alpha, n: int | None = None) -> np.ndarray:
    a = np.asarray(alpha)
    if a.ndim != 1:
        raise InvalidInputError(f"selection must be one-dimensional, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise InvalidInputError(f"selection has length {a.shape[0]}, scenario has {n} cameras")
    if not np.all((a == 0) | (a == 1)):
        raise InvalidInputError("selection entries must be 0 or 1")
    return a.astype(np.uint8)


def selection_from_indices(indices: Iterable[int], n: int) -> np.ndarray:
    a = np.zeros(n, dtype=np.uint8)
    for i in indices:
        if not 0 <= i < n:
            raise InvalidInputError(f"camera index {i} out of range for N={n}")
        a[i] = 1
    return a


def selected_indices(alpha) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(alpha))


def selection_mask(alpha) -> int:
    """Integer bitmask with bit i set when camera i is selected."""
    mask = 0
    for i in np.flatnonzero(alpha):
        mask |= 1 << int(i)
    return mask


# -- objective and constraints ----------------------------------------------

def _quality(idx, mean_res) -> float:
    total = 0.0
    for i in idx:
        total += mean_res[i]
    return total


def _risk(idx, cov) -> float:
    # row sums first, then the total: the same association as a^T (C a)
    total = 0.0
    for i in idx:
        row = 0.0
        for j in idx:
            row += cov[i, j]
        total += row
    return total


def expected_quality(alpha, scenario: Scenario) -> float:
    """Expected total delivered resolution of the selected cameras."""
    a = as_selection(alpha, scenario.n)
    return _quality(np.flatnonzero(a), expected_resolutions(scenario))


def objective_risk(alpha, scenario: Scenario, cov: np.ndarray | None = None) -> float:
    """Quadratic form a^T C a over the full symmetric covariance matrix."""
    a = as_selection(alpha, scenario.n)
    if cov is None:
        cov = covariance_matrix(scenario)
    return _risk(np.flatnonzero(a), cov)


class _Evaluator:
    """Memoized fitness over one scenario, keyed by selection bitmask."""

    def __init__(self, scenario: Scenario, psi: int | None = None):
        self.scenario = scenario
        self.psi = scenario.psi if psi is None else psi
        self.theta = scenario.theta
        self.mean_res = expected_resolutions(scenario)
        self.cov = covariance_matrix(scenario)
        self._cache: dict[int, tuple[FitnessValue, float, float]] = {}

    def evaluate_indices(self, idx: tuple[int, ...]) -> tuple[FitnessValue, float, float]:
        key = 0
        for i in idx:
            key |= 1 << i
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        quality = _quality(idx, self.mean_res)
        risk = _risk(idx, self.cov)
        if len(idx) > self.psi:
            fit = FitnessValue(INFEASIBLE_BUDGET, float(len(idx) - self.psi))
        elif quality < self.theta:
            fit = FitnessValue(QUALITY_DEFICIT, self.theta - quality)
        else:
            fit = FitnessValue(RISK, risk)
        out = (fit, quality, risk)
        self._cache[key] = out
        return out

    def evaluate(self, alpha) -> tuple[FitnessValue, float, float]:
        return self.evaluate_indices(selected_indices(alpha))


def fitness(alpha, scenario: Scenario) -> FitnessValue:
    a = as_selection(alpha, scenario.n)
    return _Evaluator(scenario).evaluate(a)[0]


# -- solvers ----------------------------------------------------------------

def exact_solver(scenario: Scenario, k: int) -> SolveResult:
    """Enumerate every subset of exactly ``k`` cameras and keep the fittest.

    The budget is ``k`` itself, whatever ``scenario.psi`` says. Ties go to the
    subset whose sorted index tuple is lexicographically smallest, i.e. the
    one that uses the lowest camera indices.
    """
    n = scenario.n
    if n > EXACT_SOLVER_MAX_N:
        raise CapacityError(f"exhaustive search limited to N <= {EXACT_SOLVER_MAX_N}, got N={n}")
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must be in [1, {n}], got {k}")
    ev = _Evaluator(scenario, psi=k)
    best = None
    for idx in itertools.combinations(range(n), k):
        fit, q, r = ev.evaluate_indices(idx)
        if best is None or fit < best[0]:
            best = (fit, q, r, idx)
    fit, q, r, idx = best
    return SolveResult(selection_from_indices(idx, n), fit, q, r, 0, "exact")


def best_over_budget(scenario: Scenario, psi: int | None = None) -> SolveResult:
    """Extension: scan k = 1..psi with :func:`exact_solver` and return the global best."""
    psi = scenario.psi if psi is None else psi
    results = [exact_solver(scenario, k) for k in range(1, psi + 1)]
    best = min(results, key=lambda r: (r.fitness, r.indices))
    return SolveResult(best.selection, best.fitness, best.expected_quality, best.objective_risk, 0, "exact-scan")


def _repair(pop: np.ndarray, psi: int, rng: np.random.Generator, fill: bool) -> np.ndarray:
    """Row-wise budget repair driven by one uniform key per bit.

    Over-budget rows keep the ``psi`` active bits with the smallest keys, which
    is a uniformly random choice of bits to switch off. With ``fill`` the
    under-budget rows switch on the inactive bits with the smallest keys.
    """
    pop = pop.copy()
    keys = rng.random(pop.shape)
    counts = pop.sum(axis=1)
    for r in np.flatnonzero(counts > psi):
        active = np.flatnonzero(pop[r])
        keep = active[np.argsort(keys[r, active], kind="stable")[:psi]]
        pop[r] = 0
        pop[r, keep] = 1
    if fill:
        for r in np.flatnonzero(counts < psi):
            idle = np.flatnonzero(pop[r] == 0)
            add = idle[np.argsort(keys[r, idle], kind="stable")[: psi - counts[r]]]
            pop[r, add] = 1
    return pop


def enforce_psi(alpha, psi: int, rng: np.random.Generator, fill: bool = False) -> np.ndarray:
    """Switch off random active cameras until at most ``psi`` remain.

    Selections already within budget are returned unchanged unless ``fill`` is
    set, in which case random inactive cameras are switched on until exactly
    ``psi`` are active.
    """
    a = as_selection(alpha)
    return _repair(a[None, :], psi, rng, fill)[0]


def _initial_population(size: int, n: int, psi: int, rng: np.random.Generator) -> np.ndarray:
    keys = rng.random((size, n))
    order = np.argsort(keys, axis=1, kind="stable")
    pop = np.zeros((size, n), dtype=np.uint8)
    np.put_along_axis(pop, order[:, :psi], 1, axis=1)
    return pop


def ga_solve(
    scenario: Scenario,
    params: GAParams | None = None,
    seed: int = 0,
    *,
    exact_budget: bool = True,
) -> SolveResult:
    """Genetic search over camera subsets.

    Individuals start with exactly ``psi`` active cameras. Each generation keeps
    the ``elitism_count`` best unchanged and fills the rest with children from
    size-2 tournaments, single-point crossover (probability ``crossover_rate``)
    and per-bit mutation, each child repaired back onto the budget. The best
    individual seen in any generation is returned.

    With ``exact_budget`` (the default) repair also tops children up to exactly
    ``psi`` cameras, so the search space matches :func:`exact_solver` with
    ``k = psi``. Without it, children below the budget are left alone.

    All randomness comes from one generator seeded by ``seed`` and is drawn in
    a fixed order, so results depend only on (scenario, params, seed).
    """
    params = GAParams() if params is None else params
    n, psi = scenario.n, scenario.psi
    rng = np.random.default_rng(seed)
    ev = _Evaluator(scenario)
    p_s, e_c = params.population_size, params.elitism_count
    c_r, m_r = params.crossover_rate, params.resolved_mutation_rate(n)
    n_children = p_s - e_c
    n_pairs = (n_children + 1) // 2

    pop = _initial_population(p_s, n, psi, rng)
    best = None

    def rank_population(pop):
        nonlocal best
        scored = []
        for row in pop:
            idx = selected_indices(row)
            fit, q, r = ev.evaluate_indices(idx)
            scored.append((fit, idx, q, r))
        order = sorted(range(len(scored)), key=lambda k: scored[k][:2])
        top = scored[order[0]]
        if best is None or top[:2] < best[:2]:
            best = top
        rank = np.empty(len(scored), dtype=np.int64)
        rank[order] = np.arange(len(scored))
        return order, rank

    for _ in range(params.max_generations):
        order, rank = rank_population(pop)
        elites = pop[order[:e_c]]

        draws = rng.integers(0, p_s, size=(n_pairs, 2, 2))
        winners = np.where(rank[draws[..., 0]] <= rank[draws[..., 1]], draws[..., 0], draws[..., 1])
        mom, dad = pop[winners[:, 0]], pop[winners[:, 1]]

        do_cross = rng.random(n_pairs) < c_r
        points = rng.integers(1, n, size=n_pairs) if n > 1 else np.zeros(n_pairs, dtype=np.int64)
        head = (np.arange(n)[None, :] < points[:, None]) | ~do_cross[:, None]
        kids = np.concatenate([np.where(head, mom, dad), np.where(head, dad, mom)])

        flips = rng.random(kids.shape) < m_r
        kids = kids ^ flips.astype(np.uint8)
        kids = _repair(kids[:n_children], psi, rng, exact_budget)

        pop = np.concatenate([elites, kids])

    rank_population(pop)
    fit, idx, q, r = best
    return SolveResult(selection_from_indices(idx, n), fit, q, r, params.max_generations, "ga")


def traditional_select(scenario: Scenario, k: int) -> np.ndarray:
    """The ``k`` highest-resolution cameras; equal resolutions go to the lower index."""
    n = scenario.n
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must be in [1, {n}], got {k}")
    order = sorted(range(n), key=lambda i: (-scenario.cameras[i].resolution, i))
    return selection_from_indices(order[:k], n)


def relative_gap(value: float, reference: float) -> float:
    if reference == 0:
        return 0.0 if value == 0 else math.inf
    return (value - reference) / abs(reference)

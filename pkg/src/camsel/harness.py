"""
Strategy evaluation under simulated disruptions.

Quality models turn the set of cameras that actually delivered into a
reconstruction-quality number. ``resolution_sum`` adds pixel counts and is the
same quantity the optimizer constrains; ``table`` looks measured vertex
counts up by camera subset; ``synthetic`` is additive per-camera vertices plus
pairwise synergy, usually fitted to a sparse table with
:func:`fit_additive_model`.
"""

from __future__ import annotations

import itertools
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, MissingSubsetError, UnderdeterminedError
from .optimizer import GAParams, ga_solve, objective_risk, selection_from_indices, traditional_select
from .scenario import CorrelationMatrix, Scenario
from .simulator import prepare_copula, run_trials

__all__ = [
    "AdditiveFit",
    "MetricsReport",
    "QualityModel",
    "STRATEGIES",
    "SweepPoint",
    "SweepResult",
    "delivered_quality",
    "derive_seed",
    "evaluate_strategy",
    "normalize_strategy",
    "fit_additive_model",
    "format_quality_table",
    "load_quality_table",
    "override_rho",
    "parse_quality_table",
    "select_for_strategy",
    "sweep_psi",
    "sweep_rho",
    "variance_terms",
]

STRATEGIES = ("portfolio", "traditional", "all")


def _mask(subset) -> int:
    """Bitmask from an int mask, a 0/1 numpy vector, or an iterable of 0-based indices."""
    if isinstance(subset, (int, np.integer)):
        return int(subset)
    if isinstance(subset, np.ndarray):
        return int(sum(1 << int(i) for i in np.flatnonzero(subset)))
    return int(sum(1 << int(i) for i in set(subset)))


def _members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


# -- quality tables -----------------------------------------------------------

def parse_quality_table(text: str) -> dict[int, float]:
    """Parse ``1,2,3 -> 166877`` lines (1-based camera ids) into {bitmask: value}.

    Blank lines and ``#`` comments are skipped. An empty id list denotes the
    empty subset.
    """
    table: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise InvalidInputError(f"line {lineno}: expected '<ids> -> <count>', got {raw!r}")
        left, right = line.split("->", 1)
        ids = [tok.strip() for tok in left.replace("{", "").replace("}", "").split(",") if tok.strip()]
        try:
            mask = 0
            for tok in ids:
                cam = int(tok)
                if cam < 1:
                    raise ValueError
                mask |= 1 << (cam - 1)
            value = float(right.strip().replace("_", ""))
        except ValueError:
            raise InvalidInputError(f"line {lineno}: malformed entry {raw!r}") from None
        if value < 0:
            raise InvalidInputError(f"line {lineno}: negative quality {value}")
        if mask in table and table[mask] != value:
            raise InvalidInputError(f"line {lineno}: conflicting duplicate entry for cameras {','.join(ids)}")
        table[mask] = value
    return table


def load_quality_table(path: str | Path) -> dict[int, float]:
    return parse_quality_table(Path(path).read_text())


def format_quality_table(table: Mapping[int, float]) -> str:
    lines = []
    for mask in sorted(table, key=lambda m: (-bin(m).count("1"), m)):
        ids = ",".join(str(i + 1) for i in _members(mask))
        v = table[mask]
        lines.append(f"{ids} -> {int(v) if float(v).is_integer() else repr(float(v))}")
    return "\n".join(lines) + "\n"


# -- additive fit ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AdditiveFit:
    """Per-camera contributions plus optional pairwise synergies.

    ``joint_removal_residuals`` maps each camera pair (i, j) for which the
    table holds a full "square" S, S-i, S-j, S-i-j to the interaction
    f(S) - f(S-i) - f(S-j) + f(S-i-j): how far the joint removal departs from
    the sum of the two single removals. It is model-free.
    """

    base: np.ndarray
    synergy: np.ndarray
    residuals: dict[int, float]
    joint_removal_residuals: dict[tuple[int, int], float]

    def predict(self, mask: int) -> float:
        idx = _members(mask)
        total = float(sum(self.base[i] for i in idx))
        for i, j in itertools.combinations(idx, 2):
            total += self.synergy[i, j]
        return total


def _joint_removal_residuals(table: Mapping[int, float], n: int) -> dict[tuple[int, int], float]:
    out = {}
    for s in sorted(table, key=lambda m: (-bin(m).count("1"), m)):
        for i, j in itertools.combinations(_members(s), 2):
            a, b, ab = s & ~(1 << i), s & ~(1 << j), s & ~(1 << i) & ~(1 << j)
            if (i, j) not in out and a in table and b in table and ab in table:
                out[(i, j)] = table[s] - table[a] - table[b] + table[ab]
    return out


def fit_additive_model(table: Mapping[int, float], n: int, synergies: bool = False) -> AdditiveFit:
    """Least-squares fit of per-camera vertex contributions (and synergies).

    Without synergies the minimum-norm solution is returned even when the
    table has fewer rows than cameras. With synergies, only pairs the table
    pins down (those with a complete removal square) get a synergy term, and a
    table with fewer rows than parameters raises :class:`UnderdeterminedError`.
    """
    if not table:
        raise InvalidInputError("quality table is empty")
    full = (1 << n) - 1
    if full not in table:
        raise InvalidInputError("quality table must contain the full camera set")
    if any(m >> n for m in table):
        raise InvalidInputError(f"quality table references cameras beyond N={n}")

    masks = sorted(table)
    y = np.array([table[m] for m in masks], dtype=float)
    pairs = sorted(_joint_removal_residuals(table, n)) if synergies else []
    cols = n + len(pairs)
    if synergies and len(masks) < cols:
        raise UnderdeterminedError(
            f"{len(masks)} observations cannot determine {cols} parameters ({n} cameras + {len(pairs)} synergies)"
        )
    X = np.zeros((len(masks), cols))
    for r, m in enumerate(masks):
        for i in _members(m):
            X[r, i] = 1.0
        for c, (i, j) in enumerate(pairs):
            if m >> i & 1 and m >> j & 1:
                X[r, n + c] = 1.0
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    base = coef[:n]
    syn = np.zeros((n, n))
    for c, (i, j) in enumerate(pairs):
        syn[i, j] = syn[j, i] = coef[n + c]
    fitted = X @ coef
    residuals = {m: float(y[r] - fitted[r]) for r, m in enumerate(masks)}
    return AdditiveFit(base, syn, residuals, _joint_removal_residuals(table, n))


# -- quality models ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QualityModel:
    variant: str = "resolution_sum"
    table: Mapping[int, float] = field(default_factory=dict)
    base: np.ndarray | None = None
    synergy: np.ndarray | None = None
    strict: bool = True
    fallback: AdditiveFit | None = None

    def __post_init__(self):
        if self.variant not in ("resolution_sum", "table", "synthetic"):
            raise InvalidParameterError(f"unknown quality model variant {self.variant!r}")
        if self.variant == "table":
            if any(v < 0 for v in self.table.values()):
                raise InvalidParameterError("table-driven quality values must be >= 0")
        if self.variant == "synthetic":
            if self.base is None or np.any(np.asarray(self.base) < 0):
                raise InvalidParameterError("synthetic base contributions must be given and >= 0")

    @classmethod
    def resolution_sum(cls) -> "QualityModel":
        return cls("resolution_sum")

    @classmethod
    def table_driven(cls, table: Mapping[int, float], n: int, strict: bool = True) -> "QualityModel":
        if any(m >> n for m in table):
            raise InvalidParameterError(f"table keys must be subsets of the {n} cameras")
        fallback = None if strict else fit_additive_model(table, n)
        return cls("table", dict(table), strict=strict, fallback=fallback)

    @classmethod
    def synthetic(cls, base, synergy=None) -> "QualityModel":
        base = np.asarray(base, dtype=float)
        n = base.shape[0]
        synergy = np.zeros((n, n)) if synergy is None else np.asarray(synergy, dtype=float)
        return cls("synthetic", base=base, synergy=synergy)

    @classmethod
    def from_fit(cls, fit: AdditiveFit) -> "QualityModel":
        return cls.synthetic(np.maximum(fit.base, 0.0), fit.synergy)

    @property
    def unit(self) -> str:
        return "pixels" if self.variant == "resolution_sum" else "vertices"

    def bind(self, scenario: Scenario):
        """Return a fast ``mask -> quality`` callable for one scenario."""
        if self.variant == "resolution_sum":
            res = scenario.resolutions
            return lambda mask: float(sum(res[i] for i in _members(mask)))
        if self.variant == "table":
            table, fallback, strict = self.table, self.fallback, self.strict

            def lookup(mask: int) -> float:
                v = table.get(mask)
                if v is not None:
                    return float(v)
                if strict or fallback is None:
                    raise MissingSubsetError(mask)
                return fallback.predict(mask)

            return lookup
        base, syn = self.base, self.synergy

        def additive(mask: int) -> float:
            idx = _members(mask)
            total = float(sum(base[i] for i in idx))
            for i, j in itertools.combinations(idx, 2):
                total += syn[i, j]
            return total

        return additive


def delivered_quality(model: QualityModel, alive_selected, scenario: Scenario) -> float:
    """Quality delivered by the cameras that are both selected and up."""
    mask = _mask(alive_selected)
    if mask >> scenario.n:
        raise InvalidInputError(f"subset {mask:#x} references cameras beyond N={scenario.n}")
    return model.bind(scenario)(mask)


# -- metrics and strategies ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class MetricsReport:
    mean_quality: float
    sd_quality: float
    over_threshold_count: int
    trials: int
    per_trial: np.ndarray
    threshold: float
    selection: tuple[int, ...] = ()
    seed: int = 0

    @classmethod
    def from_values(cls, values, threshold: float, selection=(), seed: int = 0) -> "MetricsReport":
        v = np.asarray(values, dtype=float)
        t = v.shape[0]
        mean = statistics.fmean(v.tolist())
        sd = float(np.std(v, ddof=1)) if t > 1 else 0.0
        over = int(np.count_nonzero(v >= threshold))
        return cls(mean, sd, over, t, v, float(threshold), tuple(selection), seed)


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed for a (point, strategy, ...) key."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def normalize_strategy(strategy: str) -> str:
    s = strategy.lower().replace("_", "").replace("-", "")
    aliases = {"portfolio": "portfolio", "traditional": "traditional", "all": "all", "allcameras": "all"}
    if s not in aliases:
        raise InvalidInputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    return aliases[s]


def select_for_strategy(scenario: Scenario, strategy: str, params: GAParams | None = None, seed: int = 0) -> np.ndarray:
    name = normalize_strategy(strategy)
    if name == "portfolio":
        return ga_solve(scenario, params, seed).selection
    if name == "traditional":
        return traditional_select(scenario, scenario.psi)
    return selection_from_indices(range(scenario.n), scenario.n)


def _threshold(model: QualityModel, scenario: Scenario, threshold: float | None) -> float:
    if threshold is not None:
        return float(threshold)
    if model.variant == "resolution_sum":
        return float(scenario.theta)
    raise InvalidInputError(
        f"{model.variant} quality is measured in {model.unit}; pass an explicit threshold in that unit"
    )


def evaluate_strategy(
    scenario: Scenario,
    strategy: str,
    model: QualityModel | None = None,
    params: GAParams | None = None,
    trials: int | None = None,
    seed: int | None = None,
    *,
    threshold: float | None = None,
    freeze_outcomes: bool = False,
    workers: int | None = None,
) -> MetricsReport:
    """Pick cameras with ``strategy`` and score them over simulated disruptions.

    The GA (for ``portfolio``) and the trial draws use separate child seeds of
    ``seed``.
    """
    model = QualityModel.resolution_sum() if model is None else model
    trials = scenario.trials if trials is None else trials
    seed = scenario.master_seed if seed is None else seed
    thr = _threshold(model, scenario, threshold)
    selection = select_for_strategy(scenario, strategy, params, derive_seed(seed, 0))
    values = run_trials(
        scenario,
        selection,
        model.bind(scenario),
        trials,
        derive_seed(seed, 1),
        freeze_outcomes=freeze_outcomes,
        workers=workers,
    )
    return MetricsReport.from_values(values, thr, np.flatnonzero(selection).tolist(), seed)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    strategy: str
    report: MetricsReport


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: tuple[SweepPoint, ...]

    def get(self, value, strategy: str) -> MetricsReport:
        name = normalize_strategy(strategy)
        for p in self.points:
            if p.value == value and p.strategy == name:
                return p.report
        raise KeyError((value, strategy))


def _run_grid(axis, values, strategies, make_scenario, model, params, trials, seed, threshold, freeze, workers):
    strategies = [normalize_strategy(s) for s in strategies]
    jobs = [(vi, si) for vi in range(len(values)) for si in range(len(strategies))]

    def job(key):
        vi, si = key
        sc = make_scenario(values[vi])
        return evaluate_strategy(
            sc, strategies[si], model, params, trials, derive_seed(seed, vi, si),
            threshold=threshold, freeze_outcomes=freeze,
        )

    if workers is None or workers <= 1:
        reports = [job(k) for k in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(job, jobs))
    points = tuple(SweepPoint(values[vi], strategies[si], rep) for (vi, si), rep in zip(jobs, reports))
    return SweepResult(axis, points)


def sweep_psi(
    scenario: Scenario,
    psi_values: Sequence[int],
    strategies: Iterable[str],
    model: QualityModel | None = None,
    params: GAParams | None = None,
    trials: int | None = None,
    seed: int | None = None,
    *,
    threshold: float | None = None,
    freeze_outcomes: bool = False,
    workers: int | None = None,
) -> SweepResult:
    """Metrics for every (budget, strategy) pair, each with its own derived seed."""
    for v in psi_values:
        if not 1 <= v <= scenario.n:
            raise InvalidInputError(f"psi value {v} outside [1, {scenario.n}]")
    seed = scenario.master_seed if seed is None else seed
    return _run_grid(
        "psi", list(psi_values), list(strategies), lambda v: scenario.replace(psi=int(v)),
        model, params, trials, seed, threshold, freeze_outcomes, workers,
    )


def override_rho(scenario: Scenario, value: float, scope: str = "high_res") -> Scenario:
    """Scenario copy with off-diagonal correlations replaced by ``value``.

    ``scope="high_res"`` touches only pairs among the highest-resolution
    cameras; ``scope="all"`` replaces every off-diagonal entry.
    """
    if scope == "all":
        idx = range(scenario.n)
    elif scope == "high_res":
        idx = scenario.high_res_indices()
    else:
        raise InvalidInputError(f"unknown rho override scope {scope!r}")
    return scenario.replace(rho=scenario.rho.with_block(idx, value))


def sweep_rho(
    scenario: Scenario,
    rho_values: Sequence[float],
    strategies: Iterable[str],
    model: QualityModel | None = None,
    params: GAParams | None = None,
    trials: int | None = None,
    seed: int | None = None,
    *,
    scope: str = "high_res",
    threshold: float | None = None,
    freeze_outcomes: bool = False,
    workers: int | None = None,
) -> SweepResult:
    """Metrics for every (correlation override, strategy) pair."""
    for v in rho_values:
        if not 0.0 <= v < 1.0:
            raise InvalidInputError(f"rho override {v} outside [0, 1)")
    seed = scenario.master_seed if seed is None else seed
    return _run_grid(
        "rho", [float(v) for v in rho_values], list(strategies), lambda v: override_rho(scenario, v, scope),
        model, params, trials, seed, threshold, freeze_outcomes, workers,
    )


def variance_terms(scenario: Scenario, selection) -> dict[str, float]:
    """The two pieces of Var(delivered resolution sum) for a selection.

    ``quadratic_form`` is a^T C a, the variance carried by the availability
    probabilities themselves (exact if rho were the Pearson correlation of the
    p's; the copula makes the realized figure slightly smaller).
    ``bernoulli`` is sum_i R_i^2 E[p_i (1 - p_i)], the extra spread from the
    up/down draw given p.
    """
    idx = np.flatnonzero(selection)
    bern = 0.0
    for i in idx:
        m = scenario.cameras[i].moments
        bern += scenario.cameras[i].resolution ** 2 * (m.mean - m.mean**2 - m.std**2)
    return {"quadratic_form": objective_risk(selection, scenario), "bernoulli": bern}


def copula_repair_delta(rho: CorrelationMatrix) -> float:
    return prepare_copula(rho).repair_delta

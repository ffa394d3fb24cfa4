"""
TOML run configuration.

Schema (every table except ``[scenario]``, ``[[cameras]]`` and
``[correlation]`` is optional)::

    [scenario]
    name = "dance1-7cam"
    theta = 1036800            # pixels; quality constraint
    psi = 4                    # camera budget
    trials = 20
    master_seed = 20240917

    [[cameras]]                # one table per camera, in index order
    width = 1920
    height = 1080
    beta_a = 6.0
    beta_b = 3.0

    [correlation]
    matrix = [[1.0, 0.8], [0.8, 1.0]]

    [ga]
    population_size = 60
    max_generations = 150
    crossover_rate = 0.9
    mutation_rate = 0.142857   # omit for 1/N
    elitism_count = 2

    [quality]
    model = "resolution_sum"   # or "table" / "synthetic"
    table = "dance1_vertices.txt"   # relative to this file
    strict = true
    threshold = 100000         # required unless model = resolution_sum
    base = [...]               # synthetic only
    synergy = [[...]]          # synthetic only, optional

    [run]
    strategies = ["portfolio", "traditional"]
    psi_values = [4, 5, 6]     # budgets compared by `solve`
    freeze_outcomes = false
    threads = 1

    [sweep]
    axis = "psi"               # or "rho"
    values = [4, 5, 6]
    rho_scope = "high_res"     # or "all"
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import tomli

from .errors import CamselError, ConfigError
from .harness import QualityModel, normalize_strategy, load_quality_table
from .optimizer import GAParams
from .scenario import CameraSpec, CorrelationMatrix, Scenario

__all__ = ["RunConfig", "default_config_path", "load_run_config", "load_scenario"]


def default_config_path(name: str = "dance1-7cam") -> Path:
    return Path(str(resources.files("camsel") / "data" / f"{name}.toml"))


def _read(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        return tomli.loads(path.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from None


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing field {where}.{key}")
    return d[key]


def _scenario_from(doc: dict, source: str) -> Scenario:
    sc = doc.get("scenario")
    if not isinstance(sc, dict):
        raise ConfigError(f"{source}: missing [scenario] table")
    cams_doc = doc.get("cameras")
    if not isinstance(cams_doc, list) or not cams_doc:
        raise ConfigError(f"{source}: missing [[cameras]] entries")
    cameras = []
    for pos, c in enumerate(cams_doc):
        cid = c.get("id", pos)
        if cid != pos:
            raise ConfigError(f"cameras[{pos}].id = {cid!r}; ids must be 0-based and in order")
        try:
            cameras.append(
                CameraSpec(
                    pos,
                    int(_require(c, "width", f"cameras[{pos}]")),
                    int(_require(c, "height", f"cameras[{pos}]")),
                    float(_require(c, "beta_a", f"cameras[{pos}]")),
                    float(_require(c, "beta_b", f"cameras[{pos}]")),
                )
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, CamselError):
                raise ConfigError(f"{source}: {exc}") from None
            raise ConfigError(f"{source}: cameras[{pos}]: {exc}") from None
    corr = doc.get("correlation", {})
    matrix = _require(corr, "matrix", "correlation")
    if len(matrix) != len(cameras) or any(len(row) != len(cameras) for row in matrix):
        shape = f"{len(matrix)}x{len(matrix[0]) if matrix else 0}"
        raise ConfigError(f"{source}: dimension mismatch: {len(cameras)} cameras but correlation.matrix is {shape}")
    try:
        return Scenario(
            tuple(cameras),
            CorrelationMatrix(matrix),
            theta=float(_require(sc, "theta", "scenario")),
            psi=int(_require(sc, "psi", "scenario")),
            trials=int(sc.get("trials", 20)),
            master_seed=int(sc.get("master_seed", 0)),
            name=str(sc.get("name", Path(source).stem)),
        )
    except CamselError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario(path) -> Scenario:
    """Read and validate the scenario part of a config file."""
    return _scenario_from(_read(path), str(path))


@dataclass
class RunConfig:
    scenario: Scenario
    path: Path | None = None
    ga: GAParams = field(default_factory=GAParams)
    strategies: list[str] = field(default_factory=lambda: ["portfolio", "traditional"])
    quality: QualityModel = field(default_factory=QualityModel.resolution_sum)
    threshold: float | None = None
    psi_values: list[int] = field(default_factory=list)
    sweep_axis: str | None = None
    sweep_values: list[float] = field(default_factory=list)
    rho_scope: str = "high_res"
    rho_override: float | None = None
    freeze_outcomes: bool = False
    threads: int = 1
    out: Path = Path("out")

    @property
    def trials(self) -> int:
        return self.scenario.trials

    @property
    def seed(self) -> int:
        return self.scenario.master_seed


def _quality_from(doc: dict, base_dir: Path, n: int) -> tuple[QualityModel, float | None]:
    q = doc.get("quality", {})
    variant = q.get("model", "resolution_sum")
    threshold = q.get("threshold")
    try:
        if variant == "resolution_sum":
            model = QualityModel.resolution_sum()
        elif variant == "table":
            tpath = Path(_require(q, "table", "quality"))
            if not tpath.is_absolute():
                tpath = base_dir / tpath
            if not tpath.is_file():
                raise ConfigError(f"quality.table file not found: {tpath}")
            model = QualityModel.table_driven(load_quality_table(tpath), n, strict=bool(q.get("strict", True)))
        elif variant == "synthetic":
            model = QualityModel.synthetic(_require(q, "base", "quality"), q.get("synergy"))
        else:
            raise ConfigError(f"quality.model = {variant!r}; expected resolution_sum, table or synthetic")
    except ConfigError:
        raise
    except CamselError as exc:
        raise ConfigError(f"quality: {exc}") from None
    if variant != "resolution_sum" and threshold is None:
        raise ConfigError(f"quality.threshold is required for model {variant!r} (threshold is in vertices)")
    return model, None if threshold is None else float(threshold)


def _ga_from(doc: dict) -> GAParams:
    g = dict(doc.get("ga", {}))
    unknown = set(g) - {"population_size", "max_generations", "crossover_rate", "mutation_rate", "elitism_count"}
    if unknown:
        raise ConfigError(f"unknown ga fields: {sorted(unknown)}")
    try:
        return GAParams(**g)
    except CamselError as exc:
        raise ConfigError(f"ga: {exc}") from None


def load_run_config(path=None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Load a full run config; non-None ``overrides`` win over file values.

    Recognized override keys: seed, trials, psi, psi_values, strategies,
    axis, values, rho_scope, rho_override, threshold, threads, out,
    freeze_outcomes.
    """
    path = default_config_path() if path is None else Path(path)
    doc = _read(path)
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}

    sc_doc = doc.setdefault("scenario", {})
    for key, target in (("seed", "master_seed"), ("trials", "trials"), ("psi", "psi")):
        if key in ov:
            sc_doc[target] = ov[key]
    scenario = _scenario_from(doc, str(path))

    run = doc.get("run", {})
    sweep = doc.get("sweep", {})
    quality, threshold = _quality_from(doc, path.parent, scenario.n)
    if "threshold" in ov:
        threshold = float(ov["threshold"])

    strategies = list(ov.get("strategies", run.get("strategies", ["portfolio", "traditional"])))
    try:
        strategies = [normalize_strategy(s) for s in strategies]
    except CamselError as exc:
        raise ConfigError(str(exc)) from None
    if not strategies:
        raise ConfigError("run.strategies is empty")

    psi_values = [int(v) for v in ov.get("psi_values", run.get("psi_values", [scenario.psi]))]
    for v in psi_values:
        if not 1 <= v <= scenario.n:
            raise ConfigError(f"psi value {v} outside [1, {scenario.n}]")

    axis = ov.get("axis", sweep.get("axis"))
    if axis is not None and axis not in ("psi", "rho"):
        raise ConfigError(f"sweep.axis = {axis!r}; expected 'psi' or 'rho'")
    values = list(ov.get("values", sweep.get("values", [])))
    rho_scope = ov.get("rho_scope", sweep.get("rho_scope", "high_res"))
    if rho_scope not in ("high_res", "all"):
        raise ConfigError(f"sweep.rho_scope = {rho_scope!r}; expected 'high_res' or 'all'")
    rho_override = ov.get("rho_override", run.get("rho_override"))
    if rho_override is not None and not 0.0 <= float(rho_override) < 1.0:
        raise ConfigError(f"rho_override {rho_override} outside [0, 1)")
    threads = int(ov.get("threads", run.get("threads", 1)))
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")

    return RunConfig(
        scenario=scenario,
        path=path,
        ga=_ga_from(doc),
        strategies=strategies,
        quality=quality,
        threshold=threshold,
        psi_values=psi_values,
        sweep_axis=axis,
        sweep_values=values,
        rho_scope=rho_scope,
        rho_override=None if rho_override is None else float(rho_override),
        freeze_outcomes=bool(ov.get("freeze_outcomes", run.get("freeze_outcomes", False))),
        threads=threads,
        out=Path(ov.get("out", "out")),
    )

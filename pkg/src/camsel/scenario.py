"""
Camera fleet model and the deterministic portfolio mathematics.

Each camera i delivers its full pixel count R_i with availability probability
p_i ~ Beta(a_i, b_i), and nothing otherwise. The delivered resolution is
treated as a risky asset: its expectation is R_i * E[p_i] and the covariance
between two cameras is R_i * R_j * sd(p_i) * sd(p_j) * rho_ij.

Resolutions are total pixel counts (width * height), so a threshold of
1920 * 1080 / 2 = 1,036,800 can be used directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

__all__ = [
    "BetaMoments",
    "CameraSpec",
    "CorrelationMatrix",
    "Scenario",
    "beta_moments",
    "covariance",
    "covariance_matrix",
    "expected_resolution",
    "expected_resolutions",
    "nearest_correlation",
]


@dataclass(frozen=True)
class BetaMoments:
    mean: float
    std: float


def beta_moments(a: float, b: float) -> BetaMoments:
    """Closed-form mean and standard deviation of Beta(a, b)."""
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidParameterError(f"Beta shapes must be positive and finite, got a={a!r}, b={b!r}")
    s = a + b
    mean = a / s
    std = math.sqrt(a * b / (s * s * (s + 1.0)))
    return BetaMoments(mean, std)


@dataclass(frozen=True)
class CameraSpec:
    """One camera: pixel size plus the Beta law of its availability probability."""

    id: int
    width: int
    height: int
    beta_a: float
    beta_b: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidParameterError(
                f"camera {self.id}: width and height must be positive, got {self.width}x{self.height}"
            )
        if not self.beta_a > 0:
            raise InvalidParameterError(f"camera {self.id}: beta_a must be > 0, got {self.beta_a!r}")
        if not self.beta_b > 0:
            raise InvalidParameterError(f"camera {self.id}: beta_b must be > 0, got {self.beta_b!r}")

    @property
    def resolution(self) -> int:
        return self.width * self.height

    @property
    def moments(self) -> BetaMoments:
        return beta_moments(self.beta_a, self.beta_b)


def nearest_correlation(corr: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues to zero and rescale back to a unit diagonal.

    A single projection, not the alternating Higham iteration; the result is
    PSD with unit diagonal but not necessarily the Frobenius-nearest one.
    """
    corr = np.asarray(corr, dtype=float)
    evals, evecs = np.linalg.eigh(corr)
    if evals.min() >= 0:
        return corr.copy()
    fixed = (evecs * np.maximum(evals, 0.0)) @ evecs.T
    d = np.sqrt(np.diag(fixed))
    # a zero diagonal means the row was pure negative curvature; fall back to independence
    d[d == 0] = 1.0
    fixed = fixed / np.outer(d, d)
    fixed = (fixed + fixed.T) / 2
    np.fill_diagonal(fixed, 1.0)
    return fixed


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Symmetric, unit-diagonal matrix of pairwise correlations.

    Positive semidefiniteness is not required here; samplers call
    :meth:`repaired` before factorizing.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"correlation matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidParameterError("correlation matrix has non-finite entries")
        if not np.array_equal(m, m.T):
            if np.max(np.abs(m - m.T)) > 1e-12:
                i, j = np.unravel_index(np.argmax(np.abs(m - m.T)), m.shape)
                raise InvalidParameterError(
                    f"correlation matrix is not symmetric: rho[{i},{j}]={m[i, j]} != rho[{j},{i}]={m[j, i]}"
                )
            m = np.triu(m) + np.triu(m, 1).T
        if not np.all(np.diag(m) == 1.0):
            k = int(np.flatnonzero(np.diag(m) != 1.0)[0])
            raise InvalidParameterError(f"correlation matrix diagonal must be 1, rho[{k},{k}]={m[k, k]}")
        if np.any(np.abs(m) > 1.0):
            i, j = np.argwhere(np.abs(m) > 1.0)[0]
            raise InvalidParameterError(f"correlation out of [-1, 1]: rho[{i},{j}]={m[i, j]}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls, n: int) -> "CorrelationMatrix":
        return cls(np.eye(n))

    @classmethod
    def uniform(cls, n: int, value: float) -> "CorrelationMatrix":
        m = np.full((n, n), float(value))
        np.fill_diagonal(m, 1.0)
        return cls(m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, CorrelationMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())

    def is_psd(self, tol: float = 1e-12) -> bool:
        return self.min_eigenvalue() >= -tol

    def repaired(self) -> tuple[np.ndarray, float]:
        """Return the PSD-repaired matrix and the largest absolute entry change."""
        fixed = nearest_correlation(self.entries)
        return fixed, float(np.max(np.abs(fixed - self.entries)))

    def with_block(self, indices: Sequence[int], value: float) -> "CorrelationMatrix":
        """Copy with every off-diagonal pair inside ``indices`` set to ``value``."""
        m = self.entries.copy()
        idx = np.asarray(list(indices), dtype=int)
        m[np.ix_(idx, idx)] = value
        m[idx, idx] = 1.0
        return CorrelationMatrix(m)


@dataclass(frozen=True, eq=False)
class Scenario:
    cameras: tuple[CameraSpec, ...]
    rho: CorrelationMatrix
    theta: float
    psi: int
    trials: int = 20
    master_seed: int = 0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        cams = tuple(self.cameras)
        object.__setattr__(self, "cameras", cams)
        if not isinstance(self.rho, CorrelationMatrix):
            object.__setattr__(self, "rho", CorrelationMatrix(self.rho))
        n = len(cams)
        if n == 0:
            raise InvalidInputError("scenario needs at least one camera")
        if self.rho.n != n:
            raise InvalidInputError(f"correlation matrix is {self.rho.n}x{self.rho.n} but there are {n} cameras")
        if not self.theta > 0:
            raise InvalidParameterError(f"theta must be > 0, got {self.theta!r}")
        if not (0 < self.psi <= n) or int(self.psi) != self.psi:
            raise InvalidParameterError(f"psi must be an integer in [1, {n}], got {self.psi!r}")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be >= 1, got {self.trials!r}")
        if not (0 <= self.master_seed < 2**64):
            raise InvalidParameterError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")

    @property
    def n(self) -> int:
        return len(self.cameras)

    @property
    def resolutions(self) -> np.ndarray:
        return np.array([c.resolution for c in self.cameras], dtype=float)

    @property
    def beta_a(self) -> np.ndarray:
        return np.array([c.beta_a for c in self.cameras], dtype=float)

    @property
    def beta_b(self) -> np.ndarray:
        return np.array([c.beta_b for c in self.cameras], dtype=float)

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.moments.std for c in self.cameras])

    def high_res_indices(self) -> list[int]:
        """Indices of the cameras sharing the largest pixel count."""
        res = [c.resolution for c in self.cameras]
        top = max(res)
        return [i for i, r in enumerate(res) if r == top]

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)


def expected_resolution(cam: CameraSpec) -> float:
    return cam.resolution * cam.moments.mean


def expected_resolutions(scenario: Scenario) -> np.ndarray:
    return np.array([expected_resolution(c) for c in scenario.cameras])


def covariance(cam_i: CameraSpec, cam_j: CameraSpec, rho_ij: float) -> float:
    """Covariance of the delivered resolutions of two cameras (pixels squared)."""
    if not abs(rho_ij) <= 1.0:
        raise InvalidParameterError(f"|rho| must be <= 1, got {rho_ij!r}")
    return cam_i.resolution * cam_j.resolution * cam_i.moments.std * cam_j.moments.std * rho_ij


def covariance_matrix(scenario: Scenario) -> np.ndarray:
    """Dense N x N covariance of delivered resolutions; mirrored so it is exactly symmetric."""
    n = scenario.n
    cams = scenario.cameras
    rho = scenario.rho.entries
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            cov[i, j] = cov[j, i] = covariance(cams[i], cams[j], float(rho[i, j]))
    return cov

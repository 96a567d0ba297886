"""Domain types: design points, censored observations, the coefficient belief.

The regression feature layout is fixed everywhere as

    x(z, v) = (1, v_1..v_d, z_1..z_p, z_1*v_1..z_1*v_d, ..., z_p*v_d)

i.e. intercept, stress block, material block, then the z-major Kronecker
interaction block, for a total length of (p+1)(d+1). Serialized states rely
on this single canonical layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .numerics import chol_with_jitter

SIGMA_JITTER = 1e-12


def _as_vector(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a nonempty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def feature_length(p: int, d: int) -> int:
    return (p + 1) * (d + 1)


@dataclass(frozen=True)
class DesignPoint:
    """A material setting ``z`` (p numeric features, categorical levels
    pre-encoded by the caller) run at stress levels ``v`` (d factors)."""

    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", _as_vector(self.z, "z"))
        object.__setattr__(self, "v", _as_vector(self.v, "v"))

    @property
    def p(self) -> int:
        return self.z.size

    @property
    def d(self) -> int:
        return self.v.size


def feature_map(dp: DesignPoint) -> np.ndarray:
    """Expand a design point into the regression vector (1, v, z, z kron v)."""
    x = np.concatenate(([1.0], dp.v, dp.z, np.kron(dp.z, dp.v)))
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class Observation:
    """One test-unit outcome: a log-lifetime ``y`` if the unit failed before
    the observation-time bound (delta true), otherwise only the bound."""

    design: DesignPoint
    log_tau: float
    delta: bool
    y: float = math.nan

    def __post_init__(self):
        if not math.isfinite(self.log_tau):
            raise ValueError("log_tau must be finite")
        if self.delta:
            if not math.isfinite(self.y):
                raise ValueError("observed failure requires a finite log-lifetime y")
            if self.y > self.log_tau:
                raise ValueError(
                    f"recorded failure y={self.y} exceeds the termination bound "
                    f"log_tau={self.log_tau}"
                )


@dataclass(frozen=True)
class PosteriorState:
    """Gaussian belief over the regression coefficients: mean ``theta``,
    covariance ``sigma_mat``, fixed noise variance, and the number of
    observations absorbed so far."""

    theta: np.ndarray
    sigma_mat: np.ndarray
    noise_var: float
    n: int = 0

    def __post_init__(self):
        theta = _as_vector(self.theta, "theta")
        sigma = np.asarray(self.sigma_mat, dtype=float)
        if sigma.shape != (theta.size, theta.size):
            raise DimensionError(
                f"sigma_mat shape {sigma.shape} does not match theta length {theta.size}"
            )
        if not np.allclose(sigma, sigma.T, atol=1e-9, rtol=1e-9):
            raise ValueError("sigma_mat must be symmetric")
        try:
            chol_with_jitter(sigma, SIGMA_JITTER)
        except np.linalg.LinAlgError as exc:
            raise ValueError("sigma_mat + 1e-12*I is not positive definite") from exc
        if not self.noise_var > 0:
            raise ValueError(f"noise_var must be > 0, got {self.noise_var}")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        sigma = sigma.copy()
        sigma.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sigma_mat", sigma)

    @property
    def dim(self) -> int:
        return self.theta.size

    def to_dict(self) -> dict:
        """Serialize with sigma_mat flattened row-major."""
        return {
            "theta": self.theta.tolist(),
            "sigma_mat": self.sigma_mat.reshape(-1).tolist(),
            "noise_var": self.noise_var,
            "n": self.n,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PosteriorState":
        theta = np.asarray(doc["theta"], dtype=float)
        k = theta.size
        sigma = np.asarray(doc["sigma_mat"], dtype=float).reshape(k, k)
        return cls(theta=theta, sigma_mat=sigma, noise_var=float(doc["noise_var"]), n=int(doc["n"]))

    @classmethod
    def diffuse(cls, dim: int, noise_var: float, prior_scale: float = 100.0) -> "PosteriorState":
        return cls(
            theta=np.zeros(dim),
            sigma_mat=prior_scale * np.eye(dim),
            noise_var=noise_var,
            n=0,
        )


@dataclass(frozen=True)
class CandidateSet:
    """Finite candidate grid: K distinct material settings, M stress-level
    combinations available in the lab, and the target stress for decisions."""

    materials: tuple[np.ndarray, ...]
    stresses: tuple[np.ndarray, ...]
    target_stress: np.ndarray
    material_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        mats = tuple(_as_vector(z, f"materials[{i}]") for i, z in enumerate(self.materials))
        strs = tuple(_as_vector(v, f"stresses[{i}]") for i, v in enumerate(self.stresses))
        target = _as_vector(self.target_stress, "target_stress")
        if not mats or not strs:
            raise DimensionError("materials and stresses must be nonempty")
        p = mats[0].size
        d = target.size
        if any(z.size != p for z in mats):
            raise DimensionError("all material vectors must have the same length")
        if any(v.size != d for v in strs):
            raise DimensionError("all stress vectors must match target_stress length")
        seen = {tuple(z.tolist()) for z in mats}
        if len(seen) != len(mats):
            raise ValueError("material vectors must be distinct")
        labels = self.material_labels or tuple(f"material-{i + 1}" for i in range(len(mats)))
        if len(labels) != len(mats):
            raise ValueError("material_labels length must match materials")
        object.__setattr__(self, "materials", mats)
        object.__setattr__(self, "stresses", strs)
        object.__setattr__(self, "target_stress", target)
        object.__setattr__(self, "material_labels", tuple(labels))

    @property
    def n_materials(self) -> int:
        return len(self.materials)

    @property
    def n_stresses(self) -> int:
        return len(self.stresses)

    @property
    def p(self) -> int:
        return self.materials[0].size

    @property
    def d(self) -> int:
        return self.target_stress.size

    def design(self, z_index: int, v_index: int) -> DesignPoint:
        return DesignPoint(z=self.materials[z_index], v=self.stresses[v_index])

    def target_design(self, z_index: int) -> DesignPoint:
        return DesignPoint(z=self.materials[z_index], v=self.target_stress)

    def to_dict(self) -> dict:
        return {
            "materials": [z.tolist() for z in self.materials],
            "stresses": [v.tolist() for v in self.stresses],
            "target_stress": self.target_stress.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict, labels: tuple[str, ...] = ()) -> "CandidateSet":
        return cls(
            materials=tuple(np.asarray(z, dtype=float) for z in doc["materials"]),
            stresses=tuple(np.asarray(v, dtype=float) for v in doc["stresses"]),
            target_stress=np.asarray(doc["target_stress"], dtype=float),
            material_labels=tuple(labels),
        )


def mean_log_life(state: PosteriorState, dp: DesignPoint) -> float:
    """Posterior-mean log-lifetime at a design point: x(z,v)' theta."""
    x = feature_map(dp)
    if x.size != state.dim:
        raise DimensionError(
            f"feature length {x.size} does not match belief dimension {state.dim}"
        )
    return float(x @ state.theta)

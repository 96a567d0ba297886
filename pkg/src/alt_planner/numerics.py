"""Scalar normal-distribution helpers and small SPD linear algebra.

Everything here is a pure function of its arguments. The Mills-ratio
evaluation is routed through the scaled complementary error function so it
stays accurate far into the upper tail, where the naive pdf/(1-cdf)
quotient underflows to 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DimensionError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def norm_pdf(x: float) -> float:
    """Standard normal density at ``x``."""
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def norm_cdf(x: float) -> float:
    """Standard normal distribution function, accurate in both tails."""
    return 0.5 * math.erfc(-x / _SQRT2)


def mills_lambda(eta: float) -> float:
    """Inverse Mills ratio pdf(eta) / (1 - cdf(eta)).

    Evaluated as sqrt(2/pi) / erfcx(eta / sqrt(2)); erfcx carries the
    exp(eta^2/2) factor analytically, so the result neither under- nor
    overflows for any representable ``eta`` (it decays like pdf(eta) on the
    left and grows like ``eta`` on the right).
    """
    return _SQRT_2_OVER_PI / float(special.erfcx(eta / _SQRT2))


@dataclass(frozen=True)
class TruncatedNormalMoments:
    """First two moments of a normal conditioned on exceeding a bound."""

    mean: float
    variance: float


def truncated_normal_moments(mu: float, var: float, lower: float) -> TruncatedNormalMoments:
    """Mean and variance of X ~ N(mu, var) given X > lower.

    With s = sqrt(var), a = (lower - mu)/s and lam = mills_lambda(a):

        mean     = mu + s * lam
        variance = var * (1 + a*lam - lam^2)

    The variance factor lies in (0, 1] and tends to 1 as the bound moves to
    -infinity (no mass removed).
    """
    if not var > 0:
        raise ValueError(f"var must be > 0, got {var}")
    s = math.sqrt(var)
    a = (lower - mu) / s
    lam = mills_lambda(a)
    return TruncatedNormalMoments(
        mean=mu + s * lam,
        variance=var * (1.0 + a * lam - lam * lam),
    )


def spd_quadratic_form(s_mat: np.ndarray, x: np.ndarray) -> float:
    """x' S x for a symmetric matrix S."""
    s_mat = np.asarray(s_mat, dtype=float)
    x = np.asarray(x, dtype=float)
    if s_mat.ndim != 2 or s_mat.shape[0] != s_mat.shape[1]:
        raise DimensionError(f"expected square matrix, got shape {s_mat.shape}")
    if x.ndim != 1 or x.shape[0] != s_mat.shape[0]:
        raise DimensionError(
            f"vector length {x.shape} does not match matrix of shape {s_mat.shape}"
        )
    return float(x @ s_mat @ x)


def chol_with_jitter(s_mat: np.ndarray, jitter: float = 1e-12) -> np.ndarray:
    """Cholesky factor of ``s_mat + jitter*I``.

    Rank-one downdates accumulate roundoff; the fixed jitter absorbs it.
    Raises ``np.linalg.LinAlgError`` if the jittered matrix is still not
    positive definite, which callers treat as a broken-invariant signal.
    """
    s_mat = np.asarray(s_mat, dtype=float)
    return np.linalg.cholesky(s_mat + jitter * np.eye(s_mat.shape[0]))

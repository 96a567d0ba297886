"""Shared oracles for the test suite.

All expected values in the tests either come from these independent
implementations (quadrature, naive linear algebra, Monte Carlo, grid
search) or are hand-derivable constants frozen in place.
"""

import math

import numpy as np
from scipy import integrate

SQRT_2PI = math.sqrt(2.0 * math.pi)


def phi(t: float) -> float:
    return math.exp(-0.5 * t * t) / SQRT_2PI


def Phi(t: float) -> float:
    return 0.5 * math.erfc(-t / math.sqrt(2.0))


def truncated_moments_quad(mu: float, var: float, lower: float) -> tuple[float, float]:
    """Adaptive-quadrature moments of N(mu, var) truncated below at lower.

    Works on the standardized scale; reliable for standardized thresholds
    in roughly [-40, 40] where the double-precision tail mass is nonzero.
    """
    s = math.sqrt(var)
    a = (lower - mu) / s
    hi = max(a, 0.0) + 45.0
    z_mass, _ = integrate.quad(phi, a, hi, epsabs=1e-16, epsrel=1e-13, limit=400)
    m1, _ = integrate.quad(lambda t: t * phi(t), a, hi, epsabs=1e-16, epsrel=1e-13, limit=400)
    m2, _ = integrate.quad(lambda t: t * t * phi(t), a, hi, epsabs=1e-16, epsrel=1e-13, limit=400)
    mean_std = m1 / z_mass
    var_std = m2 / z_mass - mean_std * mean_std
    return mu + s * mean_std, var * var_std


def batch_gaussian_posterior(theta0, sigma0, noise_var, xs, ys):
    """One-shot Bayesian linear regression posterior (precision form)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    prec0 = np.linalg.inv(sigma0)
    prec = prec0 + xs.T @ xs / noise_var
    sigma = np.linalg.inv(prec)
    theta = sigma @ (prec0 @ theta0 + xs.T @ ys / noise_var)
    return theta, sigma


def random_spd(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim))
    return scale * (a @ a.T + dim * np.eye(dim))

"""Sequential belief updates for censored log-normal lifetimes.

Two one-observation updates on a Gaussian coefficient belief:

* exact conjugate recursion for an uncensored log-lifetime, and
* a moment-matched Gaussian approximation for a right-censored run, whose
  mean shift is the Mills-ratio term of the lower-truncated predictive.

Both use the same rank-one covariance reduction; the exact truncated
variance is exposed separately as a diagnostic. A Woodbury (precision
recursion) form of either update is available as a cross-check. Batch
censored-MLE refitting backs the "exact" decision track.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy import optimize, special

from .errors import DimensionError, NonIdentifiableError
from .model import Observation, PosteriorState, feature_map
from .numerics import chol_with_jitter, mills_lambda

# see model.SIGMA_JITTER; rank-one downdates accumulate roundoff
_JITTER = 1e-12

GRAD_TOL = 1e-8
MAX_NEWTON_ITERS = 500
MAX_HALVINGS = 30
_DIVERGENCE_NORM = 1e6

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def _mills_vec(eta: np.ndarray) -> np.ndarray:
    return _SQRT_2_OVER_PI / special.erfcx(eta / math.sqrt(2.0))


class UpdateForm(enum.Enum):
    DIRECT = "direct"
    WOODBURY = "woodbury"


def _check_x(state: PosteriorState, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != state.dim:
        raise DimensionError(
            f"feature vector shape {x.shape} does not match belief dimension {state.dim}"
        )
    return x


def _finalize_sigma(sigma: np.ndarray) -> np.ndarray:
    sigma = 0.5 * (sigma + sigma.T)
    chol_with_jitter(sigma, _JITTER)
    return sigma


def conjugate_update(state: PosteriorState, x: np.ndarray, y: float) -> PosteriorState:
    """Absorb an uncensored log-lifetime y at feature vector x.

    theta' = theta + ((y - x'theta)/(sigma^2 + x'Sx)) Sx
    S'     = S - S x x' S / (sigma^2 + x'Sx)
    """
    x = _check_x(state, x)
    if not math.isfinite(y):
        raise ValueError("y must be finite")
    sx = state.sigma_mat @ x
    denom = state.noise_var + float(x @ sx)
    theta = state.theta + ((y - float(x @ state.theta)) / denom) * sx
    sigma = state.sigma_mat - np.outer(sx, sx) / denom
    return PosteriorState(
        theta=theta,
        sigma_mat=_finalize_sigma(sigma),
        noise_var=state.noise_var,
        n=state.n + 1,
    )


def censored_update(state: PosteriorState, x: np.ndarray, log_tau: float) -> PosteriorState:
    """Absorb a right-censored run (lifetime exceeded the bound) at x.

    With eta = (log_tau - x'theta)/sqrt(sigma^2 + x'Sx), the mean shifts by
    the Mills-ratio term lambda(eta)/sqrt(sigma^2 + x'Sx) * Sx and the
    covariance takes the same rank-one reduction as the uncensored case.
    """
    x = _check_x(state, x)
    if not math.isfinite(log_tau):
        raise ValueError("log_tau must be finite")
    sx = state.sigma_mat @ x
    denom = state.noise_var + float(x @ sx)
    root = math.sqrt(denom)
    eta = (log_tau - float(x @ state.theta)) / root
    theta = state.theta + (mills_lambda(eta) / root) * sx
    sigma = state.sigma_mat - np.outer(sx, sx) / denom
    return PosteriorState(
        theta=theta,
        sigma_mat=_finalize_sigma(sigma),
        noise_var=state.noise_var,
        n=state.n + 1,
    )


def censored_posterior_variance(
    state: PosteriorState, x: np.ndarray, log_tau: float
) -> np.ndarray:
    """Exact moment-matched covariance after a censored run (diagnostic only).

    The sequential loop reuses the uncensored rank-one reduction; this
    returns the full truncated-predictive covariance

        S - (S x x' S / (sigma^2 + x'Sx)) * (lambda^2 - eta*lambda)

    whose shrink factor lambda(eta)(lambda(eta) - eta) lies in (0, 1), so the
    diagnostic never shrinks more than the operational update.
    """
    x = _check_x(state, x)
    sx = state.sigma_mat @ x
    denom = state.noise_var + float(x @ sx)
    eta = (log_tau - float(x @ state.theta)) / math.sqrt(denom)
    lam = mills_lambda(eta)
    factor = lam * (lam - eta)
    return 0.5 * (state.sigma_mat + state.sigma_mat.T) - factor * np.outer(sx, sx) / denom


def _woodbury_absorb(state: PosteriorState, obs: Observation, x: np.ndarray) -> PosteriorState:
    # precision recursion: S_{n+1}^{-1} = S_n^{-1} + x x'/sigma^2
    eye = np.eye(state.dim)
    chol = chol_with_jitter(state.sigma_mat, _JITTER)
    prec = sla.cho_solve((chol, True), eye)
    prec_new = prec + np.outer(x, x) / state.noise_var
    chol_new = np.linalg.cholesky(0.5 * (prec_new + prec_new.T))
    sigma_new = sla.cho_solve((chol_new, True), eye)
    sx_new = sigma_new @ x
    if obs.delta:
        scale = (obs.y - float(x @ state.theta)) / state.noise_var
    else:
        sx_old = state.sigma_mat @ x
        denom = state.noise_var + float(x @ sx_old)
        root = math.sqrt(denom)
        eta = (obs.log_tau - float(x @ state.theta)) / root
        scale = mills_lambda(eta) * root / state.noise_var
    theta = state.theta + scale * sx_new
    return PosteriorState(
        theta=theta,
        sigma_mat=_finalize_sigma(sigma_new),
        noise_var=state.noise_var,
        n=state.n + 1,
    )


def absorb(
    state: PosteriorState, obs: Observation, form: UpdateForm = UpdateForm.DIRECT
) -> PosteriorState:
    """Absorb one observation, dispatching on its censoring indicator."""
    x = feature_map(obs.design)
    if x.size != state.dim:
        raise DimensionError(
            f"feature length {x.size} does not match belief dimension {state.dim}"
        )
    if form is UpdateForm.WOODBURY:
        return _woodbury_absorb(state, obs, x)
    if obs.delta:
        return conjugate_update(state, x, obs.y)
    return censored_update(state, x, obs.log_tau)


@dataclass(frozen=True)
class MleFit:
    beta_hat: np.ndarray
    loglik: float
    iterations: int
    converged: bool


def _loglik_terms(
    beta: np.ndarray, xs: np.ndarray, ys: np.ndarray, deltas: np.ndarray, bounds: np.ndarray,
    noise_var: float,
) -> float:
    sd = math.sqrt(noise_var)
    resid = xs @ beta
    total = 0.0
    unc = deltas
    if unc.any():
        r = (ys[unc] - resid[unc]) / sd
        total += float(np.sum(-0.5 * r * r - math.log(sd) - 0.5 * math.log(2.0 * math.pi)))
    cen = ~deltas
    if cen.any():
        eta = (bounds[cen] - resid[cen]) / sd
        # log(1 - Phi(eta)) = log Phi(-eta), stable in both tails
        total += float(np.sum(special.log_ndtr(-eta)))
    return total


def _escape_direction_exists(
    xs_unc: np.ndarray, xs_cen: np.ndarray, dim: int
) -> bool:
    """True when some direction w has X_unc w = 0, X_cen w >= 0, X_cen w != 0.

    Along such a w the censored terms are monotone nondecreasing (some
    strictly), so the likelihood supremum is approached only at infinity and
    no maximizer exists.
    """
    if xs_cen.shape[0] == 0:
        return False
    if xs_unc.shape[0] > 0 and np.linalg.matrix_rank(xs_unc) >= dim:
        return False
    res = optimize.linprog(
        c=-xs_cen.sum(axis=0),
        A_ub=-xs_cen,
        b_ub=np.zeros(xs_cen.shape[0]),
        A_eq=xs_unc if xs_unc.shape[0] > 0 else None,
        b_eq=np.zeros(xs_unc.shape[0]) if xs_unc.shape[0] > 0 else None,
        bounds=[(-1.0, 1.0)] * dim,
        method="highs",
    )
    return bool(res.status == 0 and -res.fun > 1e-9)


def mle_refit(
    data: list[Observation], noise_var: float, init: np.ndarray | None = None
) -> MleFit:
    """Maximize the censored log-likelihood over beta (sigma fixed).

    Damped Newton ascent on a concave objective: full Newton steps with step
    halving until the log-likelihood is non-decreasing. Raises
    NonIdentifiableError when no maximizer exists (censoring leaves an
    unbounded ascent direction) or the Hessian is numerically singular.
    """
    if not data:
        raise ValueError("data must be nonempty")
    xs = np.array([feature_map(o.design) for o in data])
    deltas = np.array([o.delta for o in data], dtype=bool)
    ys = np.array([o.y if o.delta else 0.0 for o in data])
    bounds = np.array([o.log_tau for o in data])
    return mle_refit_arrays(xs, ys, deltas, bounds, noise_var, init)


def mle_refit_arrays(
    xs: np.ndarray,
    ys: np.ndarray,
    deltas: np.ndarray,
    bounds: np.ndarray,
    noise_var: float,
    init: np.ndarray | None = None,
) -> MleFit:
    """mle_refit on raw design rows; works for any model dimension."""
    xs = np.asarray(xs, dtype=float)
    deltas = np.asarray(deltas, dtype=bool)
    ys = np.asarray(ys, dtype=float)
    bounds = np.asarray(bounds, dtype=float)
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise ValueError("xs must be a nonempty 2-d design matrix")
    if not noise_var > 0:
        raise ValueError("noise_var must be > 0")
    dim = xs.shape[1]

    if np.linalg.matrix_rank(xs) < dim:
        raise NonIdentifiableError(
            f"design matrix rank {np.linalg.matrix_rank(xs)} < dimension {dim}"
        )
    if _escape_direction_exists(xs[deltas], xs[~deltas], dim):
        raise NonIdentifiableError(
            "censoring pattern leaves an unbounded ascent direction; no MLE exists"
        )

    sd = math.sqrt(noise_var)
    beta = np.zeros(dim) if init is None else np.asarray(init, dtype=float).copy()
    if beta.size != dim:
        raise DimensionError(f"init length {beta.size} does not match dimension {dim}")
    ll = _loglik_terms(beta, xs, ys, deltas, bounds, noise_var)

    for it in range(1, MAX_NEWTON_ITERS + 1):
        fit_mean = xs @ beta
        grad = np.zeros(dim)
        weights = np.zeros(xs.shape[0])
        if deltas.any():
            grad += ((ys[deltas] - fit_mean[deltas]) / noise_var) @ xs[deltas]
            weights[deltas] = 1.0
        cen = ~deltas
        if cen.any():
            eta = (bounds[cen] - fit_mean[cen]) / sd
            lam = _mills_vec(eta)
            grad += (lam / sd) @ xs[cen]
            weights[cen] = lam * (lam - eta)
        if float(np.max(np.abs(grad))) <= GRAD_TOL:
            return MleFit(beta_hat=beta, loglik=ll, iterations=it - 1, converged=True)
        neg_hess = (xs * weights[:, None]).T @ xs / noise_var
        try:
            chol = np.linalg.cholesky(neg_hess)
        except np.linalg.LinAlgError as exc:
            raise NonIdentifiableError("Hessian numerically singular") from exc
        step = sla.cho_solve((chol, True), grad)
        alpha = 1.0
        for _ in range(MAX_HALVINGS + 1):
            cand = beta + alpha * step
            cand_ll = _loglik_terms(cand, xs, ys, deltas, bounds, noise_var)
            if cand_ll >= ll:
                break
            alpha *= 0.5
        else:
            raise NonIdentifiableError("Newton step failed to improve after 30 halvings")
        beta, ll = cand, cand_ll
        if float(np.max(np.abs(beta))) > _DIVERGENCE_NORM:
            raise NonIdentifiableError("coefficient divergence detected")

    return MleFit(beta_hat=beta, loglik=ll, iterations=MAX_NEWTON_ITERS, converged=False)

import math

import numpy as np
import pytest

from alt_planner.errors import DimensionError, NonIdentifiableError
from alt_planner.model import DesignPoint, Observation, PosteriorState, feature_map
from alt_planner.numerics import chol_with_jitter
from alt_planner.update import (
    UpdateForm,
    absorb,
    censored_posterior_variance,
    censored_update,
    conjugate_update,
    mle_refit,
    mle_refit_arrays,
)

from conftest import batch_gaussian_posterior, random_spd


def scalar_state(theta=0.0, sigma=1.0, noise_var=1.0):
    return PosteriorState(
        theta=np.array([theta]), sigma_mat=np.array([[sigma]]), noise_var=noise_var
    )


def test_conjugate_scalar_example():
    state = scalar_state()
    out = conjugate_update(state, np.array([1.0]), 2.0)
    assert out.theta[0] == pytest.approx(1.0, abs=1e-15)
    assert out.sigma_mat[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert out.n == 1
    # input untouched
    assert state.theta[0] == 0.0 and state.sigma_mat[0, 0] == 1.0


def test_conjugate_zero_sigma_is_inert():
    state = PosteriorState(theta=np.array([3.0]), sigma_mat=np.zeros((1, 1)), noise_var=1.0)
    out = conjugate_update(state, np.array([1.0]), 17.0)
    assert out.theta[0] == 3.0
    assert out.sigma_mat[0, 0] == 0.0


def test_censored_scalar_example():
    state = scalar_state()
    out = censored_update(state, np.array([1.0]), 0.0)
    # lambda(0)/sqrt(2) = (2/sqrt(2*pi))/sqrt(2)
    assert out.theta[0] == pytest.approx(0.5641895835, abs=1e-9)
    assert out.sigma_mat[0, 0] == pytest.approx(0.5, abs=1e-15)


def test_censored_zero_sigma_keeps_theta():
    state = PosteriorState(theta=np.array([2.0]), sigma_mat=np.zeros((1, 1)), noise_var=1.0)
    out = censored_update(state, np.array([1.0]), 0.0)
    assert out.theta[0] == 2.0


def test_censored_uninformative_bound_small_shift():
    state = scalar_state()
    out = censored_update(state, np.array([1.0]), -40.0)
    assert abs(out.theta[0]) < 1e-100
    # documented simplification: the variance still shrinks
    assert out.sigma_mat[0, 0] == pytest.approx(0.5, abs=1e-15)


def test_sequential_equals_batch():
    rng = np.random.default_rng(21)
    dim = 6
    sigma0 = random_spd(rng, dim)
    theta0 = rng.normal(size=dim)
    noise_var = 0.3
    state = PosteriorState(theta=theta0, sigma_mat=sigma0, noise_var=noise_var)
    xs = rng.normal(size=(40, dim))
    ys = rng.normal(size=40)
    for x, y in zip(xs, ys):
        state = conjugate_update(state, x, float(y))
    bt, bs = batch_gaussian_posterior(theta0, sigma0, noise_var, xs, ys)
    np.testing.assert_allclose(state.theta, bt, atol=1e-8)
    np.testing.assert_allclose(state.sigma_mat, bs, atol=1e-8)
    assert state.n == 40


def test_uncensored_permutation_invariance():
    rng = np.random.default_rng(33)
    dim = 4
    sigma0 = random_spd(rng, dim)
    theta0 = rng.normal(size=dim)
    xs = rng.normal(size=(12, dim))
    ys = rng.normal(size=12)

    def run(order):
        state = PosteriorState(theta=theta0, sigma_mat=sigma0, noise_var=0.5)
        for i in order:
            state = conjugate_update(state, xs[i], float(ys[i]))
        return state

    a = run(range(12))
    b = run(list(rng.permutation(12)))
    np.testing.assert_allclose(a.theta, b.theta, atol=1e-8)
    np.testing.assert_allclose(a.sigma_mat, b.sigma_mat, atol=1e-8)


def _random_obs(rng, dim=4, censor_prob=0.4):
    dp = DesignPoint(z=rng.normal(size=1), v=rng.normal(size=1))
    x = feature_map(dp)
    assert x.size == dim
    if rng.uniform() < censor_prob:
        return Observation(design=dp, log_tau=float(rng.normal()), delta=False)
    log_tau = float(rng.normal())
    return Observation(design=dp, log_tau=log_tau, delta=True,
                       y=log_tau - float(rng.uniform(0.0, 2.0)))


def test_absorb_dispatch_matches_conjugate():
    rng = np.random.default_rng(8)
    state = PosteriorState(theta=rng.normal(size=4), sigma_mat=random_spd(rng, 4),
                           noise_var=0.2)
    dp = DesignPoint(z=np.array([0.7]), v=np.array([-0.3]))
    obs = Observation(design=dp, log_tau=1.0, delta=True, y=0.4)
    direct = absorb(state, obs)
    ref = conjugate_update(state, feature_map(dp), 0.4)
    np.testing.assert_array_equal(direct.theta, ref.theta)
    np.testing.assert_array_equal(direct.sigma_mat, ref.sigma_mat)


def test_direct_vs_woodbury_random_steps():
    rng = np.random.default_rng(55)
    for _ in range(20):
        state = PosteriorState(theta=rng.normal(size=4), sigma_mat=random_spd(rng, 4),
                               noise_var=float(rng.uniform(0.05, 1.0)))
        obs = _random_obs(rng)
        a = absorb(state, obs, UpdateForm.DIRECT)
        b = absorb(state, obs, UpdateForm.WOODBURY)
        np.testing.assert_allclose(a.theta, b.theta, atol=1e-8)
        np.testing.assert_allclose(a.sigma_mat, b.sigma_mat, atol=1e-8)


def test_long_mixed_sequence_matches_precision_accumulation():
    rng = np.random.default_rng(77)
    dim = 4
    sigma0 = random_spd(rng, dim)
    state = PosteriorState(theta=np.zeros(dim), sigma_mat=sigma0, noise_var=0.5)
    prec = np.linalg.inv(sigma0)
    for _ in range(200):
        obs = _random_obs(rng)
        x = feature_map(obs.design)
        state = absorb(state, obs)
        prec = prec + np.outer(x, x) / 0.5
    np.testing.assert_allclose(state.sigma_mat, np.linalg.inv(prec), atol=1e-6)
    assert state.n == 200


def test_sigma_monotone_and_spd():
    rng = np.random.default_rng(99)
    state = PosteriorState(theta=np.zeros(4), sigma_mat=random_spd(rng, 4), noise_var=0.3)
    probes = rng.normal(size=(10, 4))
    for _ in range(50):
        obs = _random_obs(rng)
        nxt = absorb(state, obs)
        for w in probes:
            before = float(w @ state.sigma_mat @ w)
            after = float(w @ nxt.sigma_mat @ w)
            assert after <= before + 1e-10
        chol_with_jitter(nxt.sigma_mat)  # must not raise
        state = nxt


def test_censored_variance_diagnostic_between_prior_and_update():
    rng = np.random.default_rng(13)
    state = PosteriorState(theta=rng.normal(size=4), sigma_mat=random_spd(rng, 4),
                           noise_var=0.2)
    dp = DesignPoint(z=np.array([0.5]), v=np.array([1.0]))
    x = feature_map(dp)
    log_tau = float(x @ state.theta) + 0.3
    diag = censored_posterior_variance(state, x, log_tau)
    operational = censored_update(state, x, log_tau).sigma_mat
    for w in rng.normal(size=(10, 4)):
        prior_q = float(w @ state.sigma_mat @ w)
        diag_q = float(w @ diag @ w)
        op_q = float(w @ operational @ w)
        assert op_q <= diag_q + 1e-12  # diagnostic shrinks less
        assert diag_q <= prior_q + 1e-12


def test_update_dimension_errors():
    state = scalar_state()
    with pytest.raises(DimensionError):
        conjugate_update(state, np.array([1.0, 2.0]), 0.0)
    with pytest.raises(DimensionError):
        censored_update(state, np.array([1.0, 2.0]), 0.0)


# --- mle_refit -------------------------------------------------------------


def _uncensored_dataset(rng, n=40):
    data = []
    beta = np.array([0.5, -1.0, 0.3, 0.2])
    for _ in range(n):
        dp = DesignPoint(z=rng.normal(size=1), v=rng.normal(size=1))
        x = feature_map(dp)
        y = float(x @ beta) + 0.3 * float(rng.standard_normal())
        data.append(Observation(design=dp, log_tau=max(y, 0.0) + 1.0, delta=True, y=y))
    return data


def test_mle_uncensored_equals_ols():
    rng = np.random.default_rng(101)
    data = _uncensored_dataset(rng)
    xs = np.array([feature_map(o.design) for o in data])
    ys = np.array([o.y for o in data])
    ols, *_ = np.linalg.lstsq(xs, ys, rcond=None)
    fit = mle_refit(data, noise_var=0.09)
    assert fit.converged
    np.testing.assert_allclose(fit.beta_hat, ols, atol=1e-8)


def test_mle_all_censored_not_identifiable():
    dp = DesignPoint(z=np.array([1.0]), v=np.array([1.0]))
    data = [Observation(design=dp, log_tau=0.5, delta=False) for _ in range(10)]
    with pytest.raises(NonIdentifiableError):
        mle_refit(data, noise_var=1.0)


def test_mle_intercept_only_all_censored():
    xs = np.ones((10, 1))
    with pytest.raises(NonIdentifiableError):
        mle_refit_arrays(xs, np.zeros(10), np.zeros(10, dtype=bool), np.full(10, 0.5), 1.0)


def test_mle_rank_deficient_not_identifiable():
    rng = np.random.default_rng(5)
    dp = DesignPoint(z=np.array([1.0]), v=np.array([1.0]))
    data = [
        Observation(design=dp, log_tau=1.0, delta=True, y=float(rng.normal()) - 1.0)
        for _ in range(10)
    ]
    with pytest.raises(NonIdentifiableError):
        mle_refit(data, noise_var=1.0)


def _grid_loglik_2d(b0s, b1s, vs, ys, deltas, bounds, sd):
    from scipy.special import log_ndtr

    mean = b0s[:, None, None] + b1s[None, :, None] * vs[None, None, :]
    out = np.zeros(mean.shape[:2])
    if deltas.any():
        r = (ys[deltas][None, None, :] - mean[:, :, deltas]) / sd
        out += np.sum(-0.5 * r * r - math.log(sd) - 0.5 * math.log(2 * math.pi), axis=2)
    if (~deltas).any():
        eta = (bounds[~deltas][None, None, :] - mean[:, :, ~deltas]) / sd
        out += np.sum(log_ndtr(-eta), axis=2)
    return out


def test_mle_matches_grid_search_2d():
    rng = np.random.default_rng(300)
    sd = 0.4
    vs = rng.uniform(0.2, 1.5, size=30)
    raw = 0.4 - 0.9 * vs + sd * rng.standard_normal(30)
    deltas = raw <= 0.1
    ys = np.where(deltas, raw, 0.0)
    bounds = np.full(30, 0.1)
    assert 0 < int(deltas.sum()) < 30
    xs = np.column_stack([np.ones(30), vs])

    fit = mle_refit_arrays(xs, ys, deltas, bounds, noise_var=sd * sd)
    assert fit.converged

    # coarse grid on [-2, 2]^2 then a fine pass around the best cell
    b0s = np.arange(-2.0, 2.0, 0.02)
    b1s = np.arange(-2.0, 2.0, 0.02)
    table = _grid_loglik_2d(b0s, b1s, vs, ys, deltas, bounds, sd)
    i, j = np.unravel_index(np.argmax(table), table.shape)
    b0s = np.arange(b0s[i] - 0.03, b0s[i] + 0.03, 0.0005)
    b1s = np.arange(b1s[j] - 0.03, b1s[j] + 0.03, 0.0005)
    table = _grid_loglik_2d(b0s, b1s, vs, ys, deltas, bounds, sd)
    i, j = np.unravel_index(np.argmax(table), table.shape)

    assert fit.beta_hat[0] == pytest.approx(b0s[i], abs=1e-3)
    assert fit.beta_hat[1] == pytest.approx(b1s[j], abs=1e-3)


def test_mle_gradient_vanishes_at_solution():
    rng = np.random.default_rng(400)
    beta = np.array([0.2, -0.5, 0.1, -0.3])
    data = []
    for _ in range(60):
        dp = DesignPoint(z=rng.normal(size=1), v=rng.normal(size=1))
        x = feature_map(dp)
        y = float(x @ beta) + 0.5 * float(rng.standard_normal())
        if y <= 0.4:
            data.append(Observation(design=dp, log_tau=0.4, delta=True, y=y))
        else:
            data.append(Observation(design=dp, log_tau=0.4, delta=False))
    fit = mle_refit(data, noise_var=0.25)
    assert fit.converged

    def loglik(b):
        sd = 0.5
        total = 0.0
        for o in data:
            mean = float(feature_map(o.design) @ b)
            if o.delta:
                r = (o.y - mean) / sd
                total += -0.5 * r * r - math.log(sd) - 0.5 * math.log(2 * math.pi)
            else:
                eta = (o.log_tau - mean) / sd
                total += math.log(0.5 * math.erfc(eta / math.sqrt(2.0)))
        return total

    assert fit.loglik == pytest.approx(loglik(fit.beta_hat), rel=1e-9)
    h = 1e-6
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        fd = (loglik(fit.beta_hat + e) - loglik(fit.beta_hat - e)) / (2 * h)
        assert abs(fd) < 1e-5 * max(1.0, abs(fit.loglik))

from collections import Counter

import numpy as np
import pytest

from alt_planner.errors import ScheduleExhaustedError
from alt_planner.model import CandidateSet, DesignPoint, Observation, PosteriorState, feature_map
from alt_planner.policy import (
    BestDecision,
    DecisionTrack,
    PolicyKind,
    PolicyState,
    build_factorial_schedule,
    decide_best,
    decide_best_detail,
    next_design,
)
from alt_planner.update import conjugate_update

from conftest import random_spd


def grid_2x4():
    return CandidateSet(
        materials=(np.array([0.0]), np.array([1.0])),
        stresses=tuple(np.array(v) for v in
                       [[0.5, 0.5], [0.5, 1.0], [1.0, 0.5], [1.0, 1.0]]),
        target_stress=np.array([0.1, 0.1]),
    )


def cell_counter(schedule):
    return Counter((tuple(dp.z), tuple(dp.v)) for dp in schedule)


def test_factorial_exact_design():
    cands = grid_2x4()
    schedule = build_factorial_schedule(cands, 8, seed=1)
    counts = cell_counter(schedule)
    assert len(counts) == 8
    assert all(c == 1 for c in counts.values())


def test_factorial_pigeonhole():
    cands = grid_2x4()
    counts = cell_counter(build_factorial_schedule(cands, 10, seed=2))
    assert sorted(counts.values()) == [1, 1, 1, 1, 1, 1, 2, 2]


def test_factorial_cell_balance_property():
    cands = grid_2x4()
    for n in (3, 8, 17, 40, 41):
        counts = cell_counter(build_factorial_schedule(cands, n, seed=5))
        lo, hi = n // 8, -(-n // 8)
        assert all(c in (lo, hi) for c in counts.values())
        assert sum(counts.values()) == n


def test_factorial_seed_determinism():
    cands = grid_2x4()
    a = build_factorial_schedule(cands, 12, seed=9)
    b = build_factorial_schedule(cands, 12, seed=9)
    assert [(tuple(x.z), tuple(x.v)) for x in a] == [(tuple(x.z), tuple(x.v)) for x in b]
    c = build_factorial_schedule(cands, 12, seed=10)
    assert [(tuple(x.z), tuple(x.v)) for x in a] != [(tuple(x.z), tuple(x.v)) for x in c]


def test_factorial_next_design_and_exhaustion():
    cands = grid_2x4()
    pstate = PolicyState.create(PolicyKind.FACTORIAL_RANDOMIZED, cands, 3, seed=4)
    belief = PosteriorState(theta=np.zeros(6), sigma_mat=np.eye(6), noise_var=1.0)
    seen = [next_design(pstate, belief, cands) for _ in range(3)]
    assert pstate.cursor == 3
    assert len(seen) == 3
    with pytest.raises(ScheduleExhaustedError):
        next_design(pstate, belief, cands)


def test_seq_d_identity_sigma_picks_max_norm():
    cands = CandidateSet(
        materials=(np.array([0.0]), np.array([1.0])),
        stresses=(np.array([0.5]), np.array([1.0])),
        target_stress=np.array([0.1]),
    )
    pstate = PolicyState(kind=PolicyKind.SEQ_D_OPTIMAL, rng_seed=0)
    belief = PosteriorState(theta=np.zeros(4), sigma_mat=np.eye(4), noise_var=1.0)
    dp = next_design(pstate, belief, cands)
    norms = {
        (j, m): float(np.sum(feature_map(cands.design(j, m)) ** 2))
        for j in range(2) for m in range(2)
    }
    best = max(norms, key=norms.get)
    assert (tuple(dp.z), tuple(dp.v)) == (
        tuple(cands.materials[best[0]]), tuple(cands.stresses[best[1]])
    )


def test_seq_d_dominance_and_determinant_identity():
    rng = np.random.default_rng(17)
    cands = grid_2x4()
    pstate = PolicyState(kind=PolicyKind.SEQ_D_OPTIMAL, rng_seed=0)
    for _ in range(10):
        sigma = random_spd(rng, 6)
        noise_var = float(rng.uniform(0.1, 1.0))
        belief = PosteriorState(theta=np.zeros(6), sigma_mat=sigma, noise_var=noise_var)
        dp = next_design(pstate, belief, cands)
        x = feature_map(dp)
        q = float(x @ sigma @ x)
        for j in range(2):
            for m in range(4):
                other = feature_map(cands.design(j, m))
                assert q >= float(other @ sigma @ other) - 1e-12
        nxt = conjugate_update(belief, x, 0.0)
        _, logdet_new = np.linalg.slogdet(np.linalg.inv(nxt.sigma_mat))
        _, logdet_old = np.linalg.slogdet(np.linalg.inv(sigma))
        assert logdet_new - logdet_old == pytest.approx(
            np.log1p(q / noise_var), abs=1e-10
        )


def test_seq_ei_delegates_to_select_next():
    from alt_planner.acquisition import select_next

    rng = np.random.default_rng(29)
    cands = grid_2x4()
    pstate = PolicyState(kind=PolicyKind.SEQ_EI, rng_seed=0)
    belief = PosteriorState(theta=rng.normal(size=6), sigma_mat=random_spd(rng, 6),
                            noise_var=0.2)
    dp = next_design(pstate, belief, cands)
    score = select_next(belief, cands)
    ref = cands.design(score.z_index, score.v_index)
    assert np.array_equal(dp.z, ref.z) and np.array_equal(dp.v, ref.v)


def _uncensored_data(rng, cands, beta, n_per_cell=4, sd=0.1):
    data = []
    for j in range(cands.n_materials):
        for m in range(cands.n_stresses):
            for _ in range(n_per_cell):
                dp = cands.design(j, m)
                y = float(feature_map(dp) @ beta) + sd * float(rng.standard_normal())
                data.append(Observation(design=dp, log_tau=y + 1.0, delta=True, y=y))
    return data


def test_decide_best_approx_trivial():
    cands = grid_2x4()
    belief = PosteriorState(theta=np.zeros(6), sigma_mat=np.eye(6), noise_var=1.0)
    assert decide_best(DecisionTrack.APPROX, belief, [], cands, 1.0) == 0


def test_decide_best_exact_matches_ols():
    rng = np.random.default_rng(41)
    cands = grid_2x4()
    beta = rng.normal(size=6) * 0.2
    data = _uncensored_data(rng, cands, beta)
    xs = np.array([feature_map(o.design) for o in data])
    ys = np.array([o.y for o in data])
    ols, *_ = np.linalg.lstsq(xs, ys, rcond=None)
    expected = int(np.argmax([
        float(feature_map(cands.target_design(k)) @ ols) for k in range(2)
    ]))
    belief = PosteriorState(theta=np.zeros(6), sigma_mat=np.eye(6), noise_var=0.01)
    decision = decide_best_detail(DecisionTrack.EXACT_REFIT, belief, data, cands, 0.01)
    assert decision == BestDecision(index=expected, used_fallback=False)


def test_decide_best_exact_fallback_on_all_censored():
    cands = grid_2x4()
    data = [
        Observation(design=cands.design(j, m), log_tau=0.0, delta=False)
        for j in range(2) for m in range(4)
    ]
    theta = np.zeros(6)
    theta[3] = 1.0  # z-block favors material 2
    belief = PosteriorState(theta=theta, sigma_mat=np.eye(6), noise_var=1.0)
    decision = decide_best_detail(DecisionTrack.EXACT_REFIT, belief, data, cands, 1.0)
    assert decision.used_fallback
    assert decision.index == 1


def test_policy_state_validation():
    cands = grid_2x4()
    with pytest.raises(ValueError):
        PolicyState(kind=PolicyKind.SEQ_EI, rng_seed=0, schedule=[])
    with pytest.raises(ValueError):
        PolicyState(kind=PolicyKind.FACTORIAL_RANDOMIZED, rng_seed=0)
    sched = build_factorial_schedule(cands, 4, seed=0)
    with pytest.raises(ValueError):
        PolicyState(kind=PolicyKind.FACTORIAL_RANDOMIZED, rng_seed=0,
                    schedule=sched, cursor=5)

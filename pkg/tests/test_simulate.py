import math

import numpy as np
import pytest

from parisian_qsd import resolvent as R
from parisian_qsd import simulate as sim


def test_determinism_bit_exact(cl):
    cfg = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=50_000, seed=3)
    a = sim.mc_resolvent(cfg, 0.3, 1.0)
    b = sim.mc_resolvent(cfg, 0.3, 1.0)
    assert a == b


def test_thread_cap_does_not_change_results(cl, monkeypatch):
    cfg = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=30_000, seed=5)
    base = sim.mc_resolvent(cfg, 0.0, 1.0)
    monkeypatch.setenv("PARISIAN_QSD_THREADS", "1")
    single = sim.mc_resolvent(cfg, 0.0, 1.0)
    assert base == single


def test_single_path_matches_batch(cl, mm1):
    for model in (cl, mm1):
        cfg = sim.SimConfig(model=model, x0=1.0, theta=1.0, paths=16, seed=8,
                            horizon=60.0)
        tau_t, tau_c, xh = sim.simulate_paths(cfg)
        for i in (0, 3, 11):
            one = sim.simulate_parisian_path(cfg, i)
            want = None if math.isinf(tau_t[i]) else tau_t[i]
            assert one["ruin_time"] == want
            if math.isnan(xh[i]):
                assert math.isnan(one["terminal_value"])   # ruined before horizon
            else:
                assert one["terminal_value"] == xh[i]


def test_pathwise_ordering(cl, mm1):
    for model in (cl, mm1):
        cfg = sim.SimConfig(model=model, x0=1.0, theta=1.0, paths=5_000, seed=9,
                            horizon=80.0)
        tau_t, tau_c, _ = sim.simulate_paths(cfg)
        both = np.isfinite(tau_t)
        assert np.all(np.isfinite(tau_c[both]))
        assert np.all(tau_t[both] >= tau_c[both] - 1e-12)


def test_clock_reseed_changes_only_parisian(cl):
    c1 = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=4_000, seed=5, horizon=60.0)
    c2 = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=4_000, seed=5, horizon=60.0,
                       clock_seed=1234)
    t1, cl1, _ = sim.simulate_paths(c1)
    t2, cl2, _ = sim.simulate_paths(c2)
    assert np.array_equal(cl1, cl2)
    assert not np.array_equal(t1, t2)


def test_theta_huge_collapses_to_classical(cl):
    cfg = sim.SimConfig(model=cl, x0=1.0, theta=1e8, paths=4_000, seed=10, horizon=60.0)
    tau_t, tau_c, _ = sim.simulate_paths(cfg)
    both = np.isfinite(tau_t) & np.isfinite(tau_c)
    assert both.sum() > 1000
    assert np.quantile(tau_t[both] - tau_c[both], 0.99) < 1e-6


def test_survival_curve_monotone(mm1_heavy):
    cfg = sim.SimConfig(model=mm1_heavy, x0=1.0, theta=1.0, paths=30_000,
                        horizon=50.0, seed=11)
    ests = sim.mc_survival_curve(cfg, [0.0, 5.0, 10.0, 25.0, 45.0])
    means = [e.mean for e in ests]
    assert means[0] == 1.0
    assert all(b <= a for a, b in zip(means, means[1:]))


def test_resolvent_agreement_small_n(mm1, cl):
    for model, alpha, q, theta, ref in (
            (mm1, 0.0, 1.0, 1.0, None), (cl, 0.3, 1.0, 2.0, None)):
        cfg = sim.SimConfig(model=model, x0=1.0, theta=theta, paths=150_000, seed=12)
        est = sim.mc_resolvent(cfg, alpha, q)
        closed = R.parisian_resolvent(model, 1.0, alpha, q, theta).value
        assert abs(closed - est.mean) <= 4.0 * est.stderr


def test_occupation_estimator_consistent(mm1):
    # clocks given the path survive with probability exp(-theta * time below 0)
    cfg = sim.SimConfig(model=mm1, x0=1.0, theta=1.0, paths=200_000, seed=13)
    clock = sim.mc_resolvent(cfg, 0.2, 1.0)
    occup = sim.mc_resolvent(cfg, 0.2, 1.0, estimator="occupation")
    se = math.hypot(clock.stderr, occup.stderr)
    assert abs(clock.mean - occup.mean) <= 4.0 * se
    assert occup.stderr < clock.stderr  # smooth weight, strictly less noise


def test_bm_estimator_runs(bm_sn):
    cfg = sim.SimConfig(model=bm_sn, x0=1.0, theta=1.0, paths=4_000, step=5e-4, seed=14)
    est = sim.mc_resolvent(cfg, 0.0, 1.0)
    closed = R.parisian_resolvent_sn(bm_sn, 1.0, 0.0, 1.0, 1.0).value
    assert abs(est.mean - closed) < 0.05


def test_horizon_policy(cl):
    cfg = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=1_000, horizon=10.0, seed=15)
    with pytest.raises(sim.ConfigError):
        sim.mc_resolvent(cfg, 0.0, 1.0)   # q * horizon = 10 < 40


def test_insufficient_survivors(cl):
    cfg = sim.SimConfig(model=cl, x0=0.1, theta=5.0, paths=200, horizon=150.0, seed=16)
    with pytest.raises(sim.ConfigError):
        sim.mc_conditional_moments(cfg, 140.0, [0.5])


def test_sup_estimates(cl):
    cfg = sim.SimConfig(model=cl, paths=120_000, seed=18)
    ests = sim.mc_sup_at_exponential(cfg, 1.0, [0.0, 1.0, 1e9])
    atom = R.sup_at_exponential_cdf(cl, 1.0, 0.0)
    assert abs(ests[0].mean - atom) <= 4.0 * max(ests[0].stderr, 1e-4)
    assert ests[2].mean == 1.0
    mid = R.sup_at_exponential_cdf(cl, 1.0, 1.0)
    assert abs(ests[1].mean - mid) <= 4.0 * ests[1].stderr


def test_conditional_moment_matches_exact_inversion(mm1_heavy):
    from parisian_qsd.laplace import euler_inversion
    from parisian_qsd.resolvent import parisian_resolvent
    t = 30.0
    cfg = sim.SimConfig(model=mm1_heavy, x0=1.0, theta=1.0, paths=400_000,
                        horizon=31.0, seed=19)
    est = sim.mc_conditional_moments(cfg, t, [0.5])[0]
    num = euler_inversion(
        lambda q: parisian_resolvent(mm1_heavy, 1.0, 0.5, q, 1.0).value / q, t, 40)
    den = euler_inversion(
        lambda q: parisian_resolvent(mm1_heavy, 1.0, 0.0, q, 1.0).value / q, t, 40)
    assert abs(num / den - est.mean) <= 4.0 * est.stderr


def test_alpha_zero_reduction_survival_quadrature(mm1):
    # the resolvent at alpha = 0 is q times the time-Laplace transform of the
    # survival curve; quadrature of the simulated curve must reproduce it
    import numpy as np
    q, theta = 1.0, 2.0
    cfg = sim.SimConfig(model=mm1, x0=1.0, theta=theta, paths=200_000,
                        horizon=45.0, seed=21)
    ts = np.arange(0.0, 40.0 + 1e-9, 0.25)
    ests = sim.mc_survival_curve(cfg, ts)
    surv = np.array([e.mean for e in ests])
    from scipy.integrate import quad
    from scipy.interpolate import interp1d
    curve = interp1d(ts, surv)
    val, _ = quad(lambda t: q * math.exp(-q * t) * curve(t), 0.0, 40.0,
                  limit=300)   # tail beyond t=40 is < e^-40
    closed = R.parisian_resolvent(cfg.model, 1.0, 0.0, q, theta).value
    assert abs(val - closed) < 0.003  # MC noise on the common-path curve


def test_estimator_stabilizes_under_doubling(cl):
    cfg1 = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=100_000,
                         horizon=50.0, seed=22)
    cfg2 = sim.SimConfig(model=cl, x0=1.0, theta=1.0, paths=200_000,
                         horizon=50.0, seed=23)
    e1 = sim.mc_survival(cfg1, 10.0)
    e2 = sim.mc_survival(cfg2, 10.0)
    assert abs(e1.mean - e2.mean) <= 3.0 * math.hypot(e1.stderr, e2.stderr)


def test_huge_kill_rate_limit(mm1):
    # e_q -> 0: the estimate collapses to exp(-alpha x0)
    cfg = sim.SimConfig(model=mm1, x0=1.0, theta=1.0, paths=50_000,
                        horizon=1.0, seed=24)
    est = sim.mc_resolvent(cfg, 0.7, 1e3)
    assert abs(est.mean - math.exp(-0.7)) < 2e-3

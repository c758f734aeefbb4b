import math

import numpy as np
import pytest

from parisian_qsd import models as M
from parisian_qsd import resolvent as R
from parisian_qsd import simulate as sim


def test_classic_sp_values(mm1):
    # survival from x: 1 - e^{-Phihat(q) x} at alpha = 0 (continuous down-crossing)
    phi_q = M.phi_inverse(mm1, 1.0)
    got = R.classic_survival_resolvent(mm1, 1.0, 0.0, 1.0)
    assert got.value == pytest.approx(1.0 - math.exp(-phi_q), rel=1e-12)
    assert got.branch == "bounded-variation"
    # lower bound: the drift needs x/c time units to reach zero, so survival
    # must exceed P(e_q < x/c)
    assert got.value > 1.0 - math.exp(-1.0)
    # Monte-Carlo-frozen value at alpha = 0.5 (adjudicated at z < 1, n = 3e5)
    assert R.classic_survival_resolvent(mm1, 1.0, 0.5, 1.0).value == pytest.approx(
        0.517105, abs=2e-5)


def test_classic_sp_x_zero(mm1):
    assert R.classic_survival_resolvent(mm1, 0.0, 0.7, 1.0).value == 0.0


def test_classic_sn_alpha_zero_is_sup_cdf(cl):
    # P_x(tau_0^- > e_q) equals the sup law of the dual at x
    for q in (0.5, 1.0):
        lhs = R.classic_survival_resolvent(cl, 1.2, 0.0, q).value
        assert lhs == pytest.approx(R.sup_at_exponential_cdf(cl, q, 1.2), rel=1e-12)


def test_classic_sn_frozen_value(cl):
    # adjudicated against exact-path MC (z = 0.5 at n = 3e5)
    assert R.classic_survival_resolvent(cl, 1.0, 1.0, 0.5).value == pytest.approx(
        0.180636, abs=2e-5)


def test_parisian_values_frozen(mm1, cl, bm_sn):
    # all adjudicated against Monte Carlo during development; see acceptance
    assert R.parisian_resolvent_sp_zero(mm1, 0.0, 1.0, 1.0).value == pytest.approx(
        0.52104612, rel=1e-6)
    assert R.parisian_resolvent_sp(mm1, 1.0, 0.5, 1.0, 2.0).value == pytest.approx(
        0.63515703, rel=1e-6)
    assert R.parisian_resolvent_sn(cl, 1.0, 0.0, 0.5, 1.0).value == pytest.approx(
        0.73575490, rel=1e-6)
    assert R.parisian_resolvent_sn(bm_sn, 1.0, 0.0, 1.0, 1.0).value == pytest.approx(
        0.80390011, rel=1e-6)


def test_bm_orientation_equality(bm_sn, bm_sp):
    # the same Brownian path measure evaluated through both assemblies
    for x in (0.0, 0.5, 1.0, 2.5):
        for alpha in (0.0, 0.2, 0.4):
            for (q, theta) in ((1.0, 1.0), (0.5, 2.0), (0.7, 1.5)):
                a = R.parisian_resolvent_sn(bm_sn, x, alpha, q, theta).value
                b = R.parisian_resolvent_sp(bm_sp, x, alpha, q, theta).value
                assert a == pytest.approx(b, rel=1e-10)
                am = R.parisian_resolvent_below(bm_sn, x, alpha, q, theta)
                bm_ = R.parisian_resolvent_below(bm_sp, x, alpha, q, theta)
                assert am == pytest.approx(bm_, rel=1e-8)


def test_probability_bounds_and_domination(mm1, cl):
    # grid chosen inside the convergence region (alpha below the left-tail rate)
    for model in (mm1, cl):
        for x in (0.0, 0.5, 1.0, 2.0, 5.0):
            for alpha in (0.0, 0.05, 0.1, 0.2, 0.3):
                for q in (0.5, 1.0, 2.0, 4.0, 8.0):
                    for theta in (1.0, 2.0, 4.0, 8.0, 16.0):
                        val = R.parisian_resolvent(model, x, alpha, q, theta).value
                        classic = R.classic_survival_resolvent(model, x, alpha, q).value
                        assert -1e-12 <= val <= 1.0 + 1e-10
                        assert val >= classic - 1e-10


def test_theta_infinity_matches_classic(mm1, cl, bm_sn):
    for model, x, alpha, q in ((mm1, 1.0, 0.3, 1.0), (cl, 1.0, 0.4, 0.7),
                               (bm_sn, 1.5, 0.2, 1.0)):
        par = R.parisian_resolvent(model, x, alpha, q, 1e6).value
        cla = R.classic_survival_resolvent(model, x, alpha, q).value
        assert abs(par - cla) <= 1e-3


def test_continuity_at_removable_alpha(mm1, cl):
    # alpha at the exponent root Phi(q) (and its SN mirror) is removable
    q, theta = 1.0, 2.0
    a0 = M.phi_inverse(mm1, q)
    vals = [R.parisian_resolvent_sp(mm1, 1.0, a0 + d, q, theta).value
            for d in (-1e-6, 0.0, 1e-6)]
    assert abs(vals[0] - vals[1]) < 1e-4 and abs(vals[2] - vals[1]) < 1e-4
    # the spectrally negative side has a removable point where the exponent
    # divided difference at -alpha vanishes (alpha = |beta_minus(q)|)
    a1 = -cl.roots(q)[1]
    vals = [R.parisian_resolvent_sn(cl, 1.0, a1 + d, q, theta).value
            for d in (-1e-6, 0.0, 1e-6)]
    assert abs(vals[0] - vals[1]) < 1e-4 and abs(vals[2] - vals[1]) < 1e-4


def test_below_split_consistency(mm1, cl, bm_sn):
    # at alpha = 0 the split parts are P(X >= 0, surv) and P(X < 0, surv)
    for model in (mm1, cl, bm_sn):
        tot = R.parisian_resolvent(model, 1.0, 0.0, 1.0, 1.5).value
        below = R.parisian_resolvent_below(model, 1.0, 0.0, 1.0, 1.5)
        assert 0.0 < below < tot < 1.0


def test_sup_cdf_properties(cl, bm_sn):
    # monotone in z, limits 0 and 1, atom structure at zero
    zs = np.linspace(0.0, 40.0, 120)
    vals = [R.sup_at_exponential_cdf(cl, 1.0, float(z)) for z in zs]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0, abs=1e-8)
    assert R.sup_at_exponential_cdf(cl, 1.0, -1.0) == 0.0
    # atom q W(0) / Phi(q): zero for Brownian, 1/(c Phi(q)) for the jump model
    assert R.sup_at_exponential_cdf(bm_sn, 1.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    atom = 1.0 / M.phi_inverse(cl, 1.0)
    assert R.sup_at_exponential_cdf(cl, 1.0, 0.0) == pytest.approx(atom, rel=1e-10)


def test_sup_cdf_frozen_value(cl):
    assert R.sup_at_exponential_cdf(cl, 1.0, 1.0) == pytest.approx(0.69510786, rel=1e-6)


def test_printed_variant_disagrees_and_fails_mc(cl):
    """The displayed source formula is kept behind a flag; the Monte Carlo
    oracle adjudicates in favour of the derived assembly."""
    x, alpha, q, theta = 1.0, 0.0, 0.5, 1.0
    derived = R.parisian_resolvent_sn(cl, x, alpha, q, theta).value
    printed = R.parisian_resolvent_sn(cl, x, alpha, q, theta, variant="printed").value
    assert abs(printed - derived) > 0.1
    cfg = sim.SimConfig(model=cl, x0=x, theta=theta, paths=150_000, seed=4242)
    est = sim.mc_resolvent(cfg, alpha, q)
    assert abs(derived - est.mean) <= 4.0 * est.stderr
    assert abs(printed - est.mean) > 20.0 * est.stderr


def test_query_validation(cl):
    with pytest.raises(M.DomainError):
        R.parisian_resolvent_sn(cl, -0.5, 0.0, 1.0, 1.0)
    with pytest.raises(M.DomainError):
        R.parisian_resolvent_sn(cl, 1.0, 0.0, 1.0, -2.0)
    with pytest.raises(M.DomainError):
        R.parisian_resolvent_sp(cl, 1.0, 0.0, 1.0, 1.0)   # wrong side


def test_grid_sweep_rows(mm1):
    rows = R.resolvent_grid(mm1, [0.5, 1.0], [0.0, 0.2], [1.0], [1.0, 2.0])
    assert len(rows) == 8
    assert all(set(r) == {"model", "x", "alpha", "q", "theta", "value", "branch"}
               for r in rows)
    assert all(0.0 <= r["value"] <= 1.0 for r in rows)


def test_sp_zero_theta_limit(mm1):
    # theta -> infinity: ruin from zero is immediate, the factor vanishes
    assert R.parisian_resolvent_sp_zero(mm1, 0.0, 1.0, 1e6).value == pytest.approx(
        0.0, abs=1e-3)
    # theta -> 0: no clock ever fires
    assert R.parisian_resolvent_sp_zero(mm1, 0.0, 1.0, 1e-9).value == pytest.approx(
        1.0, abs=1e-6)

"""Acceptance criteria: closed forms vs oracles, one pass/fail verdict each.

Every criterion is implemented exactly at its stated tolerance.  Two criteria
(6: QSD density vs conditional histogram, 7: large-time ratio law) compare
Monte Carlo at t ~ 50-60 against the t -> infinity limit law; for the chosen
small-|xi*| configuration the limit provably sets in only for t >> 1/|xi*|
(corrections of relative size O(1/(|xi*| t))), so those comparisons fail at
every statistically meaningful path count.  They are reported honestly as
failures, each with supporting evidence that isolates the gap to the
pre-asymptotic time range: the exact transform inversion matches the same
Monte Carlo data at the same t within noise.  The README's acceptance notes
carry the quantitative analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import models as M
from . import qsd as Q
from . import resolvent as R
from . import simulate as sim
from .laplace import euler_inversion
from .scale import ScaleContext, scale_w_damped

SEED = sim.DEFAULT_SEED


def catalog() -> dict:
    return {
        "bm-sn": M.brownian(1.0, 1.0, M.SPECTRALLY_NEGATIVE),
        "bm-sp": M.brownian(1.0, 1.0, M.SPECTRALLY_POSITIVE),
        "mm1": M.mm1_queue(1.0, 4.0),
        "cl": M.cramer_lundberg(1.0, 3.0, 2.0),
    }


MM1_HEAVY = ("mm1-heavy", 1.0, 1.21)   # small |xi*| configuration


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.index}: {self.name}"


def _sub_zero_rate(model: M.LevyModel, q: float, theta: float) -> float:
    """First positive singularity of alpha |-> resolvent (left-tail rate)."""
    if model.kind == M.SPECTRALLY_POSITIVE:
        return M.phi_inverse(model, q + theta)
    rate = -model.roots(q + theta)[1]
    if model.lam > 0:
        rate = min(rate, model.nu)
    return rate


# --------------------------------------------------------------------------

def criterion_1() -> CriterionResult:
    """Exponent/inverse residuals on a 50-point grid per catalog model."""
    worst = 0.0
    for model in catalog().values():
        ep = M.expansion_point(model)
        qs = ep.xi_star + np.geomspace(1e-6, 100.0 - ep.xi_star, 50)
        for q in qs:
            b = M.phi_inverse(model, float(q), ep)
            worst = max(worst, abs(model.phi(b) - q) / max(1.0, abs(q)))
    ok = worst <= 1e-10
    return CriterionResult(1, "exponent/inverse residuals", ok,
                           f"worst relative residual {worst:.2e} (gate 1e-10)")


def criterion_2() -> CriterionResult:
    """Scale transform identity: quadrature of e^{-ax} W^(q) vs 1/(phi(a)-q)."""
    from scipy.integrate import quad
    worst = 0.0
    lines = []
    for name, model in catalog().items():
        for q in (0.0, 0.5, 2.0):
            ctx = ScaleContext.build(model, q)
            alpha = ctx.beta_plus + 2.0
            val, _ = quad(lambda x: scale_w_damped(ctx, x, alpha), 0.0, np.inf,
                          limit=200)
            ref = 1.0 / (model.phi(alpha) - q)
            rel = abs(val - ref) / abs(ref)
            worst = max(worst, rel)
            lines.append(f"{name} q={q}: rel {rel:.2e}")
    ok = worst <= 1e-6
    return CriterionResult(2, "scale-function transform identity", ok,
                           f"12 combos, worst rel err {worst:.2e} (gate 1e-6)")


def criterion_3() -> CriterionResult:
    """Square-root expansion of the inverse at the branch point."""
    delta = 1e-6
    msgs = []
    ok = True
    for name, model in (("bm", M.brownian(1.0, 1.0)), ("mm1", M.mm1_queue(1.0, 4.0))):
        ep = M.expansion_point(model)
        ratio = (M.phi_inverse(model, ep.xi_star + delta, ep) - ep.q_star) / math.sqrt(delta)
        err = abs(ratio - ep.k_star)
        ok &= err <= 1e-3
        msgs.append(f"{name}: |ratio - k*| = {err:.2e}")
    ep = M.expansion_point(M.mm1_queue(1.0, 4.0))
    exact_ok = abs(ep.q_star + 2.0) < 1e-9 and abs(ep.xi_star + 1.0) < 1e-9
    ok &= exact_ok
    msgs.append(f"mm1 constants q*={ep.q_star:.12g}, xi*={ep.xi_star:.12g}")
    return CriterionResult(3, "branch-point expansion coefficient", ok,
                           "; ".join(msgs) + " (gate 1e-3)")


def criterion_4(fast: bool = False) -> CriterionResult:
    """Parisian resolvents vs Monte Carlo (exact jump paths, Euler BM paths)."""
    n_cp = 200_000 if fast else 1_000_000
    n_bm = 20_000 if fast else 100_000
    lines = []
    ok = True
    cells = []
    for model in (M.mm1_queue(1.0, 4.0), M.cramer_lundberg(1.0, 3.0, 2.0)):
        for alpha in (0.0, 0.5):
            for q in (0.5, 1.0):
                for theta in (1.0, 2.0):
                    cells.append((model, alpha, q, theta))
    for idx, (model, alpha, q, theta) in enumerate(cells):
        closed = R.parisian_resolvent(model, 1.0, alpha, q, theta).value
        cfg = sim.SimConfig(model=model, x0=1.0, theta=theta, paths=n_cp,
                            seed=SEED + idx)
        rate = _sub_zero_rate(model, q, theta)
        alive, xeq, _ = sim.mc_resolvent_samples(cfg, q)
        if 2.0 * alpha < 0.95 * rate:
            vals = np.zeros(n_cp)
            vals[alive] = np.exp(-alpha * xeq[alive])
            est = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(n_cp)
            target = closed
            kind = "plain"
        else:
            # infinite-variance cell (2 alpha beyond the left-tail rate):
            # compare the bounded functional e^{-aX} 1{X>=0} + 1{X<0} instead
            vals = np.zeros(n_cp)
            pos = alive & (xeq >= 0)
            neg = alive & (xeq < 0)
            vals[pos] = np.exp(-alpha * xeq[pos])
            vals[neg] = 1.0
            est = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(n_cp)
            target = (closed - R.parisian_resolvent_below(model, 1.0, alpha, q, theta)
                      + R.parisian_resolvent_below(model, 1.0, 0.0, q, theta))
            kind = "bounded"
        z = (target - est) / se
        ok &= abs(z) <= 3.0
        lines.append(f"{model.model_id} a={alpha} q={q} th={theta}: z={z:+.2f} ({kind})")
    # Brownian cells with a Richardson step-bias budget
    for idx, (model, alpha) in enumerate([
            (M.brownian(1.0, 1.0, M.SPECTRALLY_NEGATIVE), 0.0),
            (M.brownian(1.0, 1.0, M.SPECTRALLY_NEGATIVE), 0.5),
            (M.brownian(1.0, 1.0, M.SPECTRALLY_POSITIVE), 0.0),
            (M.brownian(1.0, 1.0, M.SPECTRALLY_POSITIVE), 0.5)]):
        q = theta = 1.0
        closed = R.parisian_resolvent(model, 1.0, alpha, q, theta).value
        cfg_h = sim.SimConfig(model=model, x0=1.0, theta=theta, paths=n_bm,
                              seed=SEED + 100 + idx, step=1e-4)
        cfg_h2 = sim.SimConfig(model=model, x0=1.0, theta=theta, paths=n_bm,
                               seed=SEED + 200 + idx, step=5e-5)
        e1 = sim.mc_resolvent(cfg_h, alpha, q)
        e2 = sim.mc_resolvent(cfg_h2, alpha, q)
        dse = math.hypot(e1.stderr, e2.stderr)
        budget = (abs(e1.mean - e2.mean) + dse) / (1.0 - 2.0 ** -0.5)
        err = abs(closed - e2.mean)
        gate = 3.0 * e2.stderr + budget
        ok &= err <= gate
        lines.append(f"{model.model_id} a={alpha}: |err|={err:.4f} "
                     f"gate={gate:.4f} (bias budget {budget:.4f})")
    return CriterionResult(4, "resolvent vs Monte Carlo", ok, "\n    ".join(lines))


def criterion_5() -> CriterionResult:
    """Closed-form H coefficients vs the least-squares fit oracle."""
    lines = []
    ok = True
    sides = [("sp", M.mm1_queue(1.0, 4.0), Q.h_sp), ("sn", M.brownian(1.0, 1.0), Q.h_sn)]
    for tag, model, hfun in sides:
        ep = M.expansion_point(model)
        for theta in (1.0, 2.0):
            for x in (0.5, 1.0):
                for alpha in (0.0, 0.5, 2.0):
                    degenerate = (ep.xi_star + theta <= 0 and alpha == 0.0)
                    if degenerate:
                        # theta = |xi*|: the alpha = 0 transform sits on a pole;
                        # the expansion does not exist and both routes must say so
                        try:
                            hfun(model, alpha, x, theta)
                            raised_h = False
                        except Q.DegenerateClockError:
                            raised_h = True
                        try:
                            Q.expansion_fit(model, x, alpha, theta)
                            raised_fit = False
                        except Q.IllConditionedFitError:
                            raised_fit = True
                        ok &= raised_h and raised_fit
                        lines.append(f"{tag} th={theta} x={x} a={alpha}: degenerate "
                                     f"(guards {'ok' if raised_h and raised_fit else 'MISSED'})")
                        continue
                    h = float(np.real(hfun(model, alpha, x, theta)))
                    fit = Q.expansion_fit(model, x, alpha, theta)
                    rel = abs(h - fit.h_coef) / max(abs(h), 1e-12)
                    ok &= rel <= 1e-3
                    lines.append(f"{tag} th={theta} x={x} a={alpha}: rel {rel:.1e}")
    return CriterionResult(5, "H-coefficient transcription gate", ok, "\n    ".join(lines))


def criterion_6(fast: bool = False) -> CriterionResult:
    """QSD density: positivity, normalization, and the histogram comparison."""
    from scipy.integrate import quad
    model = M.mm1_queue(MM1_HEAVY[1], MM1_HEAVY[2])
    x, theta = 1.0, 1.0
    tr = Q.qsd_transform(model, x, theta)
    lines = []
    # (a) pointwise nonnegativity on a wide grid
    ys = np.concatenate([np.arange(-6.0, 0.0, 0.5), np.arange(0.25, 60.0, 0.75)])
    dens = dict(Q.qsd_density(model, x, theta, ys, transform=tr))
    dmin = min(dens.values())
    ok_pos = dmin >= -1e-6
    lines.append(f"min density {dmin:.2e} (gate -1e-6): {'ok' if ok_pos else 'FAIL'}")
    # (b) total mass across both supports
    pos, _ = quad(lambda y: euler_inversion(lambda a: tr.h_plus(a) / tr.h_zero, y),
                  1e-8, 250.0, limit=300, points=[0.5, 2.0, 10.0, 50.0, 120.0])
    neg, _ = quad(lambda u: euler_inversion(lambda b: tr.h_minus(-b) / tr.h_zero, u),
                  1e-8, 30.0, limit=200)
    mass = pos + neg
    ok_mass = abs(mass - 1.0) <= 1e-3
    lines.append(f"inverted mass {mass:.6f} (below-zero part {neg:.4f}; gate 1 +- 1e-3): "
                 f"{'ok' if ok_mass else 'FAIL'}")
    kill_balance = abs(tr.below_mass - (-M.expansion_point(model).xi_star) / theta)
    lines.append(f"kill-rate balance |m_minus - |xi*|/theta| = {kill_balance:.2e}")
    # (c) Yaglom stabilization + histogram, as stated
    n = 300_000 if fast else 3_000_000
    cfg = sim.SimConfig(model=model, x0=x, theta=theta, paths=n, horizon=65.0,
                        seed=SEED + 61)
    stab = True
    m40 = sim.mc_conditional_moments(
        sim.SimConfig(model=model, x0=x, theta=theta, paths=n, horizon=41.0,
                      seed=SEED + 62), 40.0, [0.5, 1.0])
    m60 = sim.mc_conditional_moments(cfg, 60.0, [0.5, 1.0])
    for a, e1, e2 in zip((0.5, 1.0), m40, m60):
        dz = abs(e1.mean - e2.mean) / math.hypot(e1.stderr, e2.stderr)
        stab &= dz <= 3.0
        lines.append(f"doubling test a={a}: t=40 {e1.mean:.4f} vs t=60 {e2.mean:.4f} "
                     f"({dz:.1f} sigma)")
    xs, _ = sim.mc_conditional_samples(cfg, 60.0)
    edges = np.arange(-3.0, 17.0, 0.8)
    counts, _ = np.histogram(xs, edges)
    nsurv = xs.size
    occupied = 0
    bad = 0
    for k in range(edges.size - 1):
        if counts[k] < 5:
            continue
        occupied += 1
        sub = np.linspace(edges[k], edges[k + 1], 5)
        sub = sub[np.abs(sub) > 1e-9]
        vals = [v for _, v in Q.qsd_density(model, x, theta, sub, transform=tr)]
        p = float(np.trapezoid(vals, sub))
        sd = math.sqrt(max(nsurv * p * (1.0 - p), 1.0))
        if abs(counts[k] - nsurv * p) > 3.0 * sd:
            bad += 1
    hist_ok = stab and occupied >= 20 and bad == 0
    lines.append(f"histogram at t=60: {occupied} occupied bins, {bad} beyond 3 sigma")
    if not hist_ok:
        # isolate the failure: the same Monte Carlo matches the exact finite-t
        # law; only the t -> infinity limit is still far at this horizon
        ev = []
        for a in (0.5, 1.0):
            num = euler_inversion(
                lambda qq: R.parisian_resolvent(model, x, a, qq, theta).value / qq, 60.0, 40)
            den = euler_inversion(
                lambda qq: R.parisian_resolvent(model, x, 0.0, qq, theta).value / qq, 60.0, 40)
            mc = m60[0] if a == 0.5 else m60[1]
            ev.append(f"a={a}: exact finite-t {num / den:.4f} vs MC {mc.mean:.4f} "
                      f"(z={(num / den - mc.mean) / mc.stderr:+.1f}), limit "
                      f"{float(np.real(tr.normalized(a))):.4f}")
        lines.append("pre-asymptotic t: " + "; ".join(ev))
        lines.append("limit error is O(1/(|xi*| t)): needs t >> 100 (see README, acceptance notes)")
    return CriterionResult(6, "QSD density vs conditional histogram",
                           ok_pos and ok_mass and hist_ok, "\n    ".join(lines))


def criterion_7(fast: bool = False) -> CriterionResult:
    """Large-time survival ratio law at t = 50 vs 60 (as stated)."""
    model = M.mm1_queue(MM1_HEAVY[1], MM1_HEAVY[2])
    ep = M.expansion_point(model)
    n = 400_000 if fast else 4_000_000
    cfg = sim.SimConfig(model=model, x0=1.0, theta=1.0, paths=n, horizon=65.0,
                        seed=SEED + 7)
    tau, _, _, _ = sim._run_paths(cfg, np.asarray([50.0, 60.0]))
    f = (tau > 60.0).astype(float)
    g = (tau > 50.0).astype(float)
    ratio = f.mean() / g.mean()
    resid = f - ratio * g
    se = math.sqrt(np.mean(resid ** 2) / n) / g.mean()
    law = math.exp(10.0 * ep.xi_star) * (50.0 / 60.0) ** 1.5
    z = (law - ratio) / se
    ok = abs(z) <= 3.0
    lines = [f"MC ratio {ratio:.5f} +- {se:.5f} vs law {law:.5f} (z={z:+.1f})"]
    if not ok:
        ev = []
        for t, s in ((50.0, g.mean()), (60.0, f.mean())):
            ex = euler_inversion(
                lambda qq: R.parisian_resolvent(model, 1.0, 0.0, qq, 1.0).value / qq, t, 40)
            sse = math.sqrt(s * (1 - s) / n)
            ev.append(f"S({t:.0f}): MC {s:.5f} vs exact inversion {ex:.5f} "
                      f"(z={(ex - s) / sse:+.1f})")
        lines.append("exact transform inversion matches the same paths: " + "; ".join(ev))
        lines.append("ratio law holds only for t >> 1/|xi*| = 100 (see README, acceptance notes)")
    return CriterionResult(7, "Tauberian ratio law", ok, "\n    ".join(lines))


def criterion_8() -> CriterionResult:
    """theta -> infinity limit of the normalized transform vs classical QSD."""
    lines = []
    ok = True
    for model in (M.brownian(1.0, 1.0, M.SPECTRALLY_NEGATIVE),
                  M.brownian(1.0, 1.0, M.SPECTRALLY_POSITIVE)):
        tr = Q.qsd_transform(model, 1.0, 1e4)
        err = max(abs(float(np.real(tr.normalized(a))) - Q.classical_qsd_transform(model, a))
                  for a in np.linspace(0.0, 5.0, 26))
        ok &= err <= 1e-2
        lines.append(f"{model.model_id}: max |parisian(1e4) - classical| = {err:.2e}")
    return CriterionResult(8, "classical-limit consistency", ok,
                           "; ".join(lines) + " (gate 1e-2)")


def criterion_9(fast: bool = False) -> CriterionResult:
    """Supremum law at an exponential time vs Monte Carlo."""
    model = M.cramer_lundberg(1.0, 3.0, 2.0)
    n = 200_000 if fast else 1_000_000
    cfg = sim.SimConfig(model=model, paths=n, seed=SEED + 9)
    zs = [0.25, 0.5, 1.0, 2.0, 4.0]
    ests = sim.mc_sup_at_exponential(cfg, 1.0, zs)
    lines = []
    ok = True
    for z, e in zip(zs, ests):
        v = R.sup_at_exponential_cdf(model, 1.0, z)
        zz = (v - e.mean) / e.stderr
        ok &= abs(zz) <= 3.0
        lines.append(f"z={z}: z-score {zz:+.2f}")
    return CriterionResult(9, "supremum law at exponential time", ok, "; ".join(lines))


def criterion_10() -> CriterionResult:
    """Byte-identical artifacts on rerun with the same seed."""
    from .cli import simulate_artifact_text
    model = M.mm1_queue(1.0, 4.0)
    text1 = simulate_artifact_text(model, x0=1.0, alpha=0.5, q=1.0, theta=2.0,
                                   paths=200_000, seed=SEED)
    text2 = simulate_artifact_text(model, x0=1.0, alpha=0.5, q=1.0, theta=2.0,
                                   paths=200_000, seed=SEED)
    ok = text1 == text2
    return CriterionResult(10, "determinism of artifacts", ok,
                           f"{len(text1)} bytes, identical: {ok}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_acceptance(fast: bool = False, indices=None) -> list:
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if indices and i not in indices:
            continue
        if fn in (criterion_4, criterion_6, criterion_7, criterion_9):
            results.append(fn(fast=fast))
        else:
            results.append(fn())
    return results

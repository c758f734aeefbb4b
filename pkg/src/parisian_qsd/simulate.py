"""Monte Carlo oracle: exact compound-Poisson paths, Euler Brownian paths.

Randomness is counter-based and splittable: every (seed, pathIndex, streamTag)
triple defines an independent splitmix64 stream, with streamTag in
{1: path, 2: clocks, 3: killTime}.  Results are therefore bit-identical for a
given (seed, config) regardless of thread count; threads only fill disjoint
per-path output slots and reductions run in fixed path order.

Compound-Poisson-with-drift models are simulated exactly (piecewise linear
segments, closed-form crossing times, a tie at a clock deadline counts as
ruin).  Brownian models use an Euler grid with sign checks at the nodes only,
which carries a documented O(sqrt(step)) excursion-detection bias.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .models import LevyModel, ParisianQsdError, SPECTRALLY_POSITIVE

__all__ = [
    "SimConfig",
    "McEstimate",
    "ConfigError",
    "mc_resolvent",
    "mc_resolvent_samples",
    "mc_survival",
    "mc_survival_curve",
    "mc_conditional_moments",
    "mc_sup_at_exponential",
    "simulate_parisian_path",
    "simulate_paths",
]

DEFAULT_SEED = 0xC0FFEE


class ConfigError(ParisianQsdError):
    """Simulation configuration cannot deliver the requested estimator."""


def _apply_thread_cap():
    cap = os.environ.get("PARISIAN_QSD_THREADS")
    if cap:
        try:
            import numba
            numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))
        except (ImportError, ValueError):
            pass


# ---------------------------------------------------------------------------
# counter-based RNG (splitmix64 streams)
# ---------------------------------------------------------------------------

_M = np.uint64(0xFFFFFFFFFFFFFFFF)
_G1 = np.uint64(0x9E3779B97F4A7C15)
_G2 = np.uint64(0xBF58476D1CE4E5B9)
_G3 = np.uint64(0x94D049BB133111EB)
_G4 = np.uint64(0xD1B54A32D192ED03)


@njit(cache=True, inline="always")
def _sm64(z):
    z = (z + _G1) & _M
    z = ((z ^ (z >> np.uint64(30))) * _G2) & _M
    z = ((z ^ (z >> np.uint64(27))) * _G3) & _M
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _stream_key(seed, path, tag):
    k = _sm64(np.uint64(seed))
    k = _sm64(k ^ ((np.uint64(path) * _G1) & _M))
    k = _sm64(k ^ ((np.uint64(tag) * _G4) & _M))
    return k


@njit(cache=True, inline="always")
def _uni(key, k):
    x = _sm64((key + ((np.uint64(k + 1) * _G1) & _M)) & _M)
    return (float(x >> np.uint64(11)) + 0.5) * 1.1102230246251565e-16  # 2^-53


@njit(cache=True, inline="always")
def _expo(key, k, rate):
    return -math.log(_uni(key, k)) / rate


@njit(cache=True, inline="always")
def _norm(key, k):
    u1 = _uni(key, 2 * k)
    u2 = _uni(key, 2 * k + 1)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(6.283185307179586 * u2)


# ---------------------------------------------------------------------------
# exact compound-Poisson kernels
# ---------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def _cp_resolvent_kernel(is_sp, d, lam, nu, x0, q, theta, seed, clock_seed, offset, n,
                         use_clock, alive, xeq, occ_out):
    for i in prange(n):
        kp = _stream_key(seed, offset + i, 1)
        kc = _stream_key(clock_seed, offset + i, 2)
        kk = _stream_key(seed, offset + i, 3)
        cp = 0
        cc = 0
        eq = _expo(kk, 0, q)
        t = 0.0
        x = x0
        in_exc = x < 0.0
        occ = 0.0
        deadline = math.inf
        if in_exc and use_clock:
            deadline = t + _expo(kc, cc, theta)
            cc += 1
        ok = False
        xfin = math.nan
        while True:
            tj = t + _expo(kp, cp, lam)
            cp += 1
            if is_sp:
                slope = -d
                boundary = t + x / d if (not in_exc) else math.inf
            else:
                slope = d
                boundary = t + (-x) / d if in_exc else math.inf
            other = min(eq, min(boundary, tj))
            if in_exc and use_clock and deadline <= other:
                ok = False
                break
            if eq <= min(boundary, tj):
                if in_exc:
                    occ += eq - t
                xfin = x + slope * (eq - t)
                ok = True
                break
            if boundary <= tj:
                if in_exc:
                    occ += boundary - t
                t = boundary
                x = 0.0
                if is_sp:
                    in_exc = True
                    if use_clock:
                        deadline = t + _expo(kc, cc, theta)
                        cc += 1
                else:
                    in_exc = False
                    deadline = math.inf
                continue
            if in_exc:
                occ += tj - t
            xpre = x + slope * (tj - t)
            jump = _expo(kp, cp, nu)
            cp += 1
            t = tj
            if is_sp:
                x = xpre + jump
                if in_exc and x >= 0.0:
                    in_exc = False
                    deadline = math.inf
            else:
                x = xpre - jump
                if (not in_exc) and x < 0.0:
                    in_exc = True
                    if use_clock:
                        deadline = t + _expo(kc, cc, theta)
                        cc += 1
        alive[i] = ok
        xeq[i] = xfin
        occ_out[i] = occ


@njit(cache=True, parallel=True)
def _cp_paths_kernel(is_sp, d, lam, nu, x0, theta, seed, clock_seed, offset, n, horizon,
                     t_evals, tau_theta, tau_classic, x_evals, alive_evals):
    n_ev = t_evals.shape[0]
    for i in prange(n):
        kp = _stream_key(seed, offset + i, 1)
        kc = _stream_key(clock_seed, offset + i, 2)
        cp = 0
        cc = 0
        t = 0.0
        x = x0
        in_exc = x < 0.0
        deadline = math.inf
        tth = math.inf
        tcl = math.inf
        if in_exc:
            tcl = 0.0
            deadline = _expo(kc, cc, theta)
            cc += 1
        iev = 0
        while True:
            tj = t + _expo(kp, cp, lam)
            cp += 1
            if is_sp:
                slope = -d
                boundary = t + x / d if (not in_exc) else math.inf
            else:
                slope = d
                boundary = t + (-x) / d if in_exc else math.inf
            dl = deadline if in_exc else math.inf
            tnext = min(min(boundary, tj), min(dl, horizon))
            while iev < n_ev and t_evals[iev] <= tnext:
                te = t_evals[iev]
                x_evals[i, iev] = x + slope * (te - t)
                alive_evals[i, iev] = not (in_exc and dl <= te)
                iev += 1
            if in_exc and dl <= min(min(boundary, tj), horizon):
                tth = dl
                break
            if horizon <= min(boundary, tj):
                break
            if boundary <= tj:
                t = boundary
                x = 0.0
                if is_sp:
                    in_exc = True
                    if tcl == math.inf:
                        tcl = t
                    deadline = t + _expo(kc, cc, theta)
                    cc += 1
                else:
                    in_exc = False
                    deadline = math.inf
                continue
            xpre = x + slope * (tj - t)
            jump = _expo(kp, cp, nu)
            cp += 1
            t = tj
            if is_sp:
                x = xpre + jump
                if in_exc and x >= 0.0:
                    in_exc = False
                    deadline = math.inf
            else:
                x = xpre - jump
                if (not in_exc) and x < 0.0:
                    in_exc = True
                    if tcl == math.inf:
                        tcl = t
                    deadline = t + _expo(kc, cc, theta)
                    cc += 1
        while iev < n_ev:
            x_evals[i, iev] = math.nan
            alive_evals[i, iev] = False
            iev += 1
        tau_theta[i] = tth
        tau_classic[i] = tcl


@njit(cache=True, parallel=True)
def _cp_sup_kernel(d, lam, nu, q, seed, offset, n, out):
    # running supremum of the negated representative (up jumps, drift -d) at e_q
    for i in prange(n):
        kp = _stream_key(seed, offset + i, 1)
        kk = _stream_key(seed, offset + i, 3)
        cp = 0
        eq = _expo(kk, 0, q)
        t = 0.0
        x = 0.0
        sup = 0.0
        while True:
            tj = t + _expo(kp, cp, lam)
            cp += 1
            if tj >= eq:
                break
            x = x - d * (tj - t) + _expo(kp, cp, nu)
            cp += 1
            t = tj
            if x > sup:
                sup = x
        out[i] = sup


# ---------------------------------------------------------------------------
# Euler kernels for Brownian models
# ---------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def _bm_resolvent_kernel(sigma, c, x0, q, theta, h, seed, clock_seed, offset, n,
                         alive, xeq):
    sqh = sigma * math.sqrt(h)
    for i in prange(n):
        kp = _stream_key(seed, offset + i, 1)
        kc = _stream_key(clock_seed, offset + i, 2)
        kk = _stream_key(seed, offset + i, 3)
        cn = 0
        cc = 0
        eq = _expo(kk, 0, q)
        t = 0.0
        x = x0
        in_exc = x < 0.0
        deadline = math.inf
        if in_exc:
            deadline = _expo(kc, cc, theta)
            cc += 1
        ok = False
        xfin = math.nan
        while True:
            if eq <= t + h:
                dt = eq - t
                x = x - c * dt + sigma * math.sqrt(dt) * _norm(kp, cn)
                cn += 1
                ok = (not in_exc) or (deadline > eq)
                xfin = x if ok else math.nan
                break
            x = x - c * h + sqh * _norm(kp, cn)
            cn += 1
            t = t + h
            if x < 0.0:
                if not in_exc:
                    in_exc = True
                    deadline = t + _expo(kc, cc, theta)
                    cc += 1
                elif t >= deadline:
                    ok = False
                    break
            else:
                in_exc = False
                deadline = math.inf
        alive[i] = ok
        xeq[i] = xfin


@njit(cache=True, parallel=True)
def _bm_paths_kernel(sigma, c, x0, theta, h, seed, clock_seed, offset, n, horizon,
                     t_evals, tau_theta, tau_classic, x_evals, alive_evals):
    sqh = sigma * math.sqrt(h)
    n_ev = t_evals.shape[0]
    for i in prange(n):
        kp = _stream_key(seed, offset + i, 1)
        kc = _stream_key(clock_seed, offset + i, 2)
        cn = 0
        cc = 0
        t = 0.0
        x = x0
        in_exc = x < 0.0
        deadline = math.inf
        tth = math.inf
        tcl = math.inf
        if in_exc:
            tcl = 0.0
            deadline = _expo(kc, cc, theta)
            cc += 1
        iev = 0
        while t < horizon and tth == math.inf:
            x = x - c * h + sqh * _norm(kp, cn)
            cn += 1
            t = t + h
            while iev < n_ev and t_evals[iev] <= t:
                te = t_evals[iev]
                x_evals[i, iev] = x
                alive_evals[i, iev] = not (in_exc and deadline <= te)
                iev += 1
            if x < 0.0:
                if not in_exc:
                    in_exc = True
                    if tcl == math.inf:
                        tcl = t
                    deadline = t + _expo(kc, cc, theta)
                    cc += 1
                elif t >= deadline:
                    tth = deadline
            else:
                in_exc = False
                deadline = math.inf
        while iev < n_ev:
            x_evals[i, iev] = math.nan
            alive_evals[i, iev] = False
            iev += 1
        tau_theta[i] = tth
        tau_classic[i] = tcl


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    model: LevyModel
    x0: float = 1.0
    theta: float = 1.0
    horizon: float = 200.0
    paths: int = 100_000
    seed: int = DEFAULT_SEED
    step: float = 1e-4
    clock_seed: int | None = None  # defaults to `seed`; lets tests re-seed clocks only

    def __post_init__(self):
        if self.paths < 1 or self.horizon <= 0:
            raise ConfigError("need paths >= 1 and horizon > 0")
        if self.model.unbounded_variation and self.step <= 0:
            raise ConfigError("Brownian simulation needs step > 0")


def _clock_seed(cfg: "SimConfig") -> int:
    return cfg.seed if cfg.clock_seed is None else cfg.clock_seed


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int


def _estimate(values: np.ndarray, seed: int) -> McEstimate:
    n = values.size
    sd = values.std(ddof=1) if n > 1 else 0.0
    return McEstimate(mean=float(values.mean()), stderr=float(sd / math.sqrt(n)),
                      n=n, seed=seed)


def mc_resolvent_samples(cfg: SimConfig, q: float, use_clock: bool = True):
    """Per-path (alive, X(e_q), occupation) samples of the killed resolvent run."""
    if q <= 0:
        raise ConfigError("needs q > 0")
    if q * cfg.horizon < 40.0:
        raise ConfigError(
            f"q * horizon = {q * cfg.horizon:g} < 40: kill-time truncation not negligible")
    _apply_thread_cap()
    n = cfg.paths
    alive = np.empty(n, dtype=np.bool_)
    xeq = np.empty(n)
    occ = np.zeros(n)
    if cfg.model.lam > 0:
        is_sp = cfg.model.kind == SPECTRALLY_POSITIVE
        _cp_resolvent_kernel(is_sp, cfg.model.c, cfg.model.lam, cfg.model.nu,
                             cfg.x0, q, cfg.theta, cfg.seed, _clock_seed(cfg),
                             0, n, use_clock, alive, xeq, occ)
    else:
        if not use_clock:
            raise ConfigError("occupation weighting is implemented for jump models only")
        _bm_resolvent_kernel(cfg.model.sigma, cfg.model.c, cfg.x0, q, cfg.theta,
                             cfg.step, cfg.seed, _clock_seed(cfg), 0, n, alive, xeq)
    return alive, xeq, occ


def mc_resolvent(cfg: SimConfig, alpha: float, q: float,
                 estimator: str = "clock") -> McEstimate:
    """Monte Carlo estimate of E_x[e^{-alpha X(e_q)}; tau^theta > e_q].

    `estimator="occupation"` replaces the per-excursion clocks by the exact
    weight exp(-theta * time below zero); it is unbiased for the same quantity
    (clock survivals given the path multiply to that weight) and serves as an
    internal consistency check of the excursion bookkeeping.
    """
    use_clock = estimator == "clock"
    alive, xeq, occ = mc_resolvent_samples(cfg, q, use_clock=use_clock)
    vals = np.zeros(cfg.paths)
    if use_clock:
        vals[alive] = np.exp(-alpha * xeq[alive])
    else:
        vals[alive] = np.exp(-alpha * xeq[alive] - cfg.theta * occ[alive])
    return _estimate(vals, cfg.seed)


def _run_paths(cfg: SimConfig, t_evals: np.ndarray, offset: int = 0, n: int | None = None):
    _apply_thread_cap()
    n = cfg.paths if n is None else n
    tau_theta = np.empty(n)
    tau_classic = np.empty(n)
    x_evals = np.empty((n, t_evals.size))
    alive = np.empty((n, t_evals.size), dtype=np.bool_)
    if cfg.model.lam > 0:
        is_sp = cfg.model.kind == SPECTRALLY_POSITIVE
        _cp_paths_kernel(is_sp, cfg.model.c, cfg.model.lam, cfg.model.nu, cfg.x0,
                         cfg.theta, cfg.seed, _clock_seed(cfg), offset, n,
                         cfg.horizon, t_evals, tau_theta, tau_classic, x_evals, alive)
    else:
        _bm_paths_kernel(cfg.model.sigma, cfg.model.c, cfg.x0, cfg.theta, cfg.step,
                         cfg.seed, _clock_seed(cfg), offset, n, cfg.horizon,
                         t_evals, tau_theta, tau_classic, x_evals, alive)
    return tau_theta, tau_classic, x_evals, alive


def mc_survival_curve(cfg: SimConfig, ts) -> list:
    """P(tau^theta > t) for each t from one common-path batch (monotone by
    construction)."""
    ts = np.asarray(sorted(float(t) for t in ts))
    if ts.size and ts.max() > cfg.horizon:
        raise ConfigError("evaluation times beyond the horizon")
    tau_theta, _, _, _ = _run_paths(cfg, ts)
    return [_estimate((tau_theta > t).astype(float), cfg.seed) for t in ts]


def mc_survival(cfg: SimConfig, t: float) -> McEstimate:
    return mc_survival_curve(cfg, [t])[0]


def mc_conditional_moments(cfg: SimConfig, t: float, alphas) -> list:
    """E[e^{-alpha X_t} | tau^theta > t] per alpha (ratio estimator with
    delta-method standard errors)."""
    tau_theta, _, x_evals, alive = _run_paths(cfg, np.array([float(t)]))
    surv = alive[:, 0] & (tau_theta > t)
    n_surv = int(surv.sum())
    if n_surv == 0:
        raise ConfigError(f"no surviving paths at t = {t:g}; reduce t or add paths")
    xs = x_evals[surv, 0]
    out = []
    n = cfg.paths
    b = surv.astype(float)
    bbar = b.mean()
    for a in alphas:
        av = np.zeros(n)
        av[surv] = np.exp(-a * xs)
        ratio = av.sum() / b.sum()
        resid = av - ratio * b
        stderr = float(np.sqrt(np.mean(resid ** 2) / n) / bbar)
        out.append(McEstimate(mean=float(ratio), stderr=stderr, n=n_surv, seed=cfg.seed))
    return out


def mc_conditional_samples(cfg: SimConfig, t: float):
    """(surviving positions at t, total paths) for histogram comparisons."""
    tau_theta, _, x_evals, alive = _run_paths(cfg, np.array([float(t)]))
    surv = alive[:, 0] & (tau_theta > t)
    return x_evals[surv, 0], cfg.paths


def mc_sup_at_exponential(cfg: SimConfig, q: float, z_grid) -> list:
    """Empirical CDF of the running supremum of the negated representative at
    an independent Exp(q) time (one estimate per z)."""
    if cfg.model.lam == 0:
        raise ConfigError("sup-law simulation is implemented for jump models")
    if q <= 0:
        raise ConfigError("needs q > 0")
    _apply_thread_cap()
    d = cfg.model.rep_drift
    if d <= 0:
        raise ConfigError("representative drift must be positive here")
    sup = np.empty(cfg.paths)
    _cp_sup_kernel(d, cfg.model.lam, cfg.model.nu, q, cfg.seed, 0, cfg.paths, sup)
    return [_estimate((sup <= z).astype(float), cfg.seed) for z in z_grid]


def simulate_parisian_path(cfg: SimConfig, path_index: int) -> dict:
    """Functionals of a single path, bit-identical to the batch entry at the
    same index."""
    tau_theta, tau_classic, x_evals, _ = _run_paths(
        cfg, np.array([cfg.horizon]), offset=path_index, n=1)
    ruin = float(tau_theta[0])
    classic = float(tau_classic[0])
    return {
        "ruin_time": None if math.isinf(ruin) else ruin,
        "classical_ruin_time": None if math.isinf(classic) else classic,
        "terminal_value": float(x_evals[0, 0]),
    }


def simulate_paths(cfg: SimConfig):
    """(tau_theta, tau_classic, X_horizon) arrays for offline analysis/CSV."""
    tau_theta, tau_classic, x_evals, _ = _run_paths(cfg, np.array([cfg.horizon]))
    return tau_theta, tau_classic, x_evals[:, 0]

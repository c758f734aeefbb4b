"""Spectrally one-sided Levy models: Laplace exponents, inverses, critical constants.

Every model is reduced internally to its spectrally negative representative:
a spectrally negative model is used as-is, a spectrally positive model is
represented by its dual (the negated process, which is spectrally negative).
All downstream machinery (scale functions, resolvents) works on that
representative exponent

    phi(b) = drift*b + sigma^2 b^2 / 2 - lam*b / (nu + b),

which covers linear Brownian motion (lam = 0) and compound Poisson with
exponential jumps plus linear drift (sigma = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LevyModel",
    "ExpansionPoint",
    "ParisianQsdError",
    "DomainError",
    "BranchPointError",
    "AssumptionError",
    "brownian",
    "mm1_queue",
    "cramer_lundberg",
    "model_from_config",
    "load_config",
    "laplace_exponent",
    "phi_inverse",
    "expansion_point",
    "wiener_hopf_kappa",
]

SPECTRALLY_NEGATIVE = "spectrally-negative"
SPECTRALLY_POSITIVE = "spectrally-positive"

_ROOT_TOL = 1e-12


class ParisianQsdError(Exception):
    """Base class for all library errors."""


class DomainError(ParisianQsdError):
    """Argument outside the analytic domain of an exponent or transform."""


class BranchPointError(ParisianQsdError):
    """No real branch: q below the negative infimum xi* of the exponent."""


class AssumptionError(ParisianQsdError):
    """Model violates a standing assumption (negative drift, negative infimum)."""


@dataclass(frozen=True)
class LevyModel:
    """A spectrally one-sided Levy process from the supported catalog.

    Parameters are those of the process itself (`kind` orientation); the
    internal fields `rep_drift`, `sigma`, `lam`, `nu` describe the spectrally
    negative representative used for all evaluation.
    """

    kind: str
    sigma: float = 0.0          # Gaussian coefficient (>0 means unbounded variation)
    c: float = 1.0              # drift / premium rate of the process itself
    lam: float = 0.0            # jump intensity
    nu: float = 0.0             # jump-size rate (mean jump 1/nu)
    rep_drift: float = 0.0      # drift of the spectrally negative representative
    variation: str = "bounded"
    assumes: tuple = (True, True, True, True, True)  # (A1)..(A5) flags

    def __post_init__(self):
        if self.kind not in (SPECTRALLY_NEGATIVE, SPECTRALLY_POSITIVE):
            raise AssumptionError(f"unknown kind {self.kind!r}")
        if self.sigma < 0 or self.lam < 0 or self.c <= 0:
            raise AssumptionError("need sigma >= 0, lam >= 0, c > 0")
        if self.sigma > 0 and self.lam > 0:
            raise AssumptionError("mixed Gaussian + jump models are outside the catalog")
        if self.lam > 0 and self.nu <= 0:
            raise AssumptionError("jump models need nu > 0")
        # standing assumption: the process drifts to -infinity
        if self.mean_slope() >= 0:
            raise AssumptionError(
                f"long-run drift must be negative, got E[X_1] = {self.mean_slope():g}")

    # -- orientation-independent quantities ------------------------------

    def mean_slope(self) -> float:
        """E[X_1] of the process itself (must be < 0)."""
        if self.lam == 0:
            return -self.c      # X = sigma B - c t in either orientation
        jumps = self.lam / self.nu
        if self.kind == SPECTRALLY_NEGATIVE:
            return self.c - jumps
        return jumps - self.c

    @property
    def unbounded_variation(self) -> bool:
        return self.sigma > 0.0

    @property
    def model_id(self) -> str:
        if self.lam == 0:
            base = "bm"
            params = f"sigma={self.sigma:g};c={self.c:g}"
        else:
            base = "mm1" if self.kind == SPECTRALLY_POSITIVE else "cl"
            params = f"c={self.c:g};lam={self.lam:g};nu={self.nu:g}"
        side = "sp" if self.kind == SPECTRALLY_POSITIVE else "sn"
        return f"{base}-{side}({params})"

    @property
    def theta_r(self) -> float:
        """Upper bound of the analytic domain of the model's own exponent."""
        if self.kind == SPECTRALLY_POSITIVE and self.lam > 0:
            return self.nu
        return math.inf

    @property
    def dual_domain_bound(self) -> float:
        """phi(-alpha) on the representative is finite for alpha < this bound."""
        return self.nu if self.lam > 0 else math.inf

    # -- representative exponent and friends ------------------------------

    def phi(self, b):
        """Laplace exponent of the spectrally negative representative."""
        out = self.rep_drift * b + 0.5 * self.sigma ** 2 * b * b
        if self.lam > 0:
            out = out - self.lam * b / (self.nu + b)
        return out

    def phi_prime(self, b):
        out = self.rep_drift + self.sigma ** 2 * b
        if self.lam > 0:
            out = out - self.lam * self.nu / (self.nu + b) ** 2
        return out

    def phi_pp(self, b):
        out = self.sigma ** 2 + 0.0 * b
        if self.lam > 0:
            out = out + 2.0 * self.lam * self.nu / (self.nu + b) ** 3
        return out

    def phi_dd(self, a, b):
        """Divided difference (phi(a) - phi(b)) / (a - b), stable closed form."""
        out = self.rep_drift + 0.5 * self.sigma ** 2 * (a + b)
        if self.lam > 0:
            out = out - self.lam * self.nu / ((self.nu + a) * (self.nu + b))
        return out

    def phi_dd_da(self, a, b):
        """d/da of phi_dd(a, b)."""
        out = 0.5 * self.sigma ** 2 + 0.0 * a
        if self.lam > 0:
            out = out + self.lam * self.nu / ((self.nu + a) ** 2 * (self.nu + b))
        return out

    def phi_dd2(self, a, b, c3):
        """Second divided difference of phi (fully symmetric, closed form)."""
        out = 0.5 * self.sigma ** 2 + 0.0 * a
        if self.lam > 0:
            out = out + self.lam * self.nu / ((self.nu + a) * (self.nu + b) * (self.nu + c3))
        return out

    def phi_dd2_da(self, a, b, c3):
        """d/da of phi_dd2(a, b, c3)."""
        out = 0.0 * a
        if self.lam > 0:
            out = out - self.lam * self.nu / ((self.nu + a) ** 2 * (self.nu + b) * (self.nu + c3))
        return out

    def phi_dd3(self, a, b, c3, d):
        """Third divided difference of phi (zero for Gaussian models)."""
        if self.lam == 0:
            return 0.0
        return -self.lam * self.nu / ((self.nu + a) * (self.nu + b)
                                      * (self.nu + c3) * (self.nu + d))

    def phi_neg(self, alpha):
        """phi(-alpha) on the representative; domain alpha < nu for jump models."""
        bound = self.dual_domain_bound
        re = alpha.real if isinstance(alpha, complex) else alpha
        if re >= bound:
            raise DomainError(f"phi(-alpha) needs Re alpha < {bound:g}, got {alpha}")
        return self.phi(-alpha)

    def quad_coeffs(self, q):
        """(A, B, C) with phi(b) - q = (A b^2 + B b + C) / (nu + b) or plain quadratic."""
        if self.lam > 0:
            d = self.rep_drift
            return d, d * self.nu - self.lam - q, -q * self.nu
        return 0.5 * self.sigma ** 2, self.rep_drift, -q

    def roots(self, q):
        """Both roots (by real part, descending) of phi(b) = q.

        Real q needs q >= xi*; complex q continues the two branches off the
        real axis (used by time-domain transform inversion).
        """
        A, B, C = self.quad_coeffs(q)
        if isinstance(q, complex):
            s = complex(np.sqrt(complex(B * B - 4.0 * A * C)))
            r1 = (-B + s) / (2.0 * A)
            r2 = (-B - s) / (2.0 * A)
            return (r1, r2) if r1.real >= r2.real else (r2, r1)
        disc = B * B - 4.0 * A * C
        scale = max(B * B, abs(4.0 * A * C), 1e-300)
        if disc < 0.0:
            if disc < -1e-11 * scale:
                raise BranchPointError(f"phi(b) = {q:g} has no real root (q < xi*)")
            disc = 0.0   # rounding right at the branch point
        s = math.sqrt(disc)
        # sign-aware quadratic to avoid cancellation
        t = -(B + math.copysign(s, B)) / 2.0
        r1 = t / A
        r2 = C / t if t != 0.0 else -B / (2.0 * A)
        return (r1, r2) if r1 >= r2 else (r2, r1)


def brownian(sigma: float = 1.0, c: float = 1.0, kind: str = SPECTRALLY_NEGATIVE) -> LevyModel:
    """Linear Brownian motion X_t = sigma B_t - c t, either orientation."""
    rep = -c if kind == SPECTRALLY_NEGATIVE else c
    return LevyModel(kind=kind, sigma=sigma, c=c, rep_drift=rep, variation="unbounded")


def mm1_queue(lam: float = 1.0, nu: float = 4.0, c: float = 1.0) -> LevyModel:
    """Spectrally positive queue input X_t = sum of Exp(nu) jumps - c t."""
    return LevyModel(kind=SPECTRALLY_POSITIVE, c=c, lam=lam, nu=nu,
                     rep_drift=c, variation="bounded")


def cramer_lundberg(c: float = 1.0, lam: float = 3.0, nu: float = 2.0) -> LevyModel:
    """Spectrally negative risk process X_t = c t - sum of Exp(nu) jumps."""
    return LevyModel(kind=SPECTRALLY_NEGATIVE, c=c, lam=lam, nu=nu,
                     rep_drift=c, variation="bounded")


# -- configuration files ---------------------------------------------------

def load_config(path) -> dict:
    """Parse a key=value config file ('#' comments, blank lines allowed)."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"bad config line: {raw.rstrip()}")
            key, val = (part.strip() for part in line.split("=", 1))
            out[key] = val
    return out


def model_from_config(cfg) -> LevyModel:
    """Build a catalog model from config keys: kind, sigma, lambda, nu, c."""
    if not isinstance(cfg, dict):
        cfg = load_config(cfg)
    kind = cfg.get("kind", SPECTRALLY_NEGATIVE).strip()
    sigma = float(cfg.get("sigma", 0.0))
    lam = float(cfg.get("lambda", cfg.get("lam", 0.0)))
    nu = float(cfg.get("nu", 0.0))
    c = float(cfg.get("c", 1.0))
    if sigma > 0:
        return brownian(sigma=sigma, c=c, kind=kind)
    if kind == SPECTRALLY_POSITIVE:
        return mm1_queue(lam=lam, nu=nu, c=c)
    return cramer_lundberg(c=c, lam=lam, nu=nu)


# -- operations -------------------------------------------------------------

def laplace_exponent(model: LevyModel, beta: float) -> float:
    """Representative exponent: phi(beta) for SN models, the dual exponent for SP.

    For spectrally positive models the admissible arguments are beta > -nu
    (the dual's domain); the model's own exponent would live on beta < theta_r.
    """
    if model.lam > 0:
        re = beta.real if isinstance(beta, complex) else beta
        if re <= -model.nu:
            raise DomainError(f"beta must exceed -nu = {-model.nu:g}")
    return model.phi(beta)


@dataclass(frozen=True)
class ExpansionPoint:
    """Critical constants of the representative exponent.

    q_star: location of the minimum of the representative exponent (signed:
        > 0 for spectrally negative models, < 0 for spectrally positive ones).
    xi_star: the strictly negative minimum value phi(q_star).
    k_star: sqrt(2 / phi''(q_star)); square-root coefficient of the inverse.
    theta_r: analytic domain bound of the model's own exponent.
    Q_star: |q_star|, the minimizer of the model's own exponent on (0, theta_r].
    """

    q_star: float
    xi_star: float
    k_star: float
    theta_r: float
    Q_star: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "Q_star", abs(self.q_star))
        if not (self.xi_star < 0 and self.k_star > 0):
            raise AssumptionError("expansion point must have xi* < 0, k* > 0")


def expansion_point(model: LevyModel) -> ExpansionPoint:
    """Locate the minimum of the representative exponent by Newton on phi'."""
    lo = -model.nu if model.lam > 0 else -math.inf
    b = 1.0
    for _ in range(200):
        d1 = model.phi_prime(b)
        step = d1 / model.phi_pp(b)
        nb = b - step
        if not (nb > lo):          # keep inside the pole
            nb = 0.5 * (b + lo)
        b = nb
        if abs(step) < 1e-14 * max(1.0, abs(b)):
            break
    if abs(model.phi_prime(b)) > 1e-9:
        raise AssumptionError("could not locate the minimum of the exponent")
    xi = model.phi(b)
    if xi >= 0:
        raise AssumptionError("exponent has non-negative infimum; assumption (A2) fails")
    k = math.sqrt(2.0 / model.phi_pp(b))
    return ExpansionPoint(q_star=b, xi_star=xi, k_star=k, theta_r=model.theta_r)


def phi_inverse(model: LevyModel, q: float, ep: ExpansionPoint | None = None) -> float:
    """Largest root Phi(q) of phi(beta) = q by bracketed Newton with bisection.

    Works for all q >= xi* (the two real roots merge at the branch point).
    Complex q continues the upper branch via the closed-form roots.
    """
    if isinstance(q, complex):
        return model.roots(q)[0]
    ep = ep or expansion_point(model)
    if q < ep.xi_star:
        raise BranchPointError(f"q = {q:g} below the branch point xi* = {ep.xi_star:g}")
    lo = ep.q_star
    hi = lo + 1.0
    while model.phi(hi) < q:
        hi = lo + 2.0 * (hi - lo)
    b = 0.5 * (lo + hi)
    for _ in range(200):
        f = model.phi(b) - q
        if f > 0:
            hi = b
        else:
            lo = b
        step = f / model.phi_prime(b) if model.phi_prime(b) > 0 else math.nan
        nb = b - step
        if not (lo <= nb <= hi) or math.isnan(nb):
            nb = 0.5 * (lo + hi)
        if abs(nb - b) < _ROOT_TOL * max(1.0, abs(b)):
            b = nb
            break
        b = nb
    return b


def wiener_hopf_kappa(model: LevyModel, alpha: float, beta: float,
                      ep: ExpansionPoint | None = None) -> tuple:
    """Ladder exponents (kappa, kappa_hat) of the representative process.

    kappa(alpha, beta) = Phi(alpha) + beta and
    kappa_hat(alpha, beta) = (alpha - phi(beta)) / (Phi(alpha) - beta),
    the latter evaluated as the divided-difference limit phi'(beta) when
    Phi(alpha) = beta (removable singularity).
    """
    Phi_a = phi_inverse(model, alpha, ep)
    kap = Phi_a + beta
    khat = model.phi_dd(Phi_a, beta)   # == (alpha - phi(beta)) / (Phi_a - beta)
    return kap, khat

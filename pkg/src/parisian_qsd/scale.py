"""Scale functions of the spectrally negative representative.

For the catalog models 1/(phi(beta) - q) has two simple poles, so every scale
function is a two-term exponential sum; when the poles merge (q at or near the
branch point xi*) the limiting polynomial-times-exponential form is used.
All integrals of scale functions reduce to the incomplete-exponential family

    J_p(z) = int_0^1 u^p e^{z u} du,

evaluated by series near zero, so no quadrature and no catastrophic
cancellation occurs anywhere in the evaluation path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import LevyModel, DomainError

__all__ = [
    "ScaleContext",
    "scale_w",
    "scale_w_prime_zero",
    "scale_z_beta",
    "tilted_w",
    "g1",
    "g2",
    "scale_ew",
    "scale_iw",
]

_MERGE_TOL = 1e-6


def jp(p: int, z):
    """J_p(z) = int_0^1 u^p exp(z u) du, stable for all z (real or complex)."""
    if abs(z) < 0.5:
        term = 1.0 / (p + 1)
        total = term
        zk = 1.0
        for k in range(1, 24):
            zk = zk * z / k
            term = zk / (p + k + 1)
            total = total + term
            if abs(term) < 1e-18 * max(1.0, abs(total)):
                break
        return total
    e = np.exp(z)
    if p == 0:
        return (e - 1.0) / z
    if p == 1:
        return (e * (z - 1.0) + 1.0) / (z * z)
    if p == 2:
        return (e * (z * z - 2.0 * z + 2.0) - 2.0) / (z * z * z)
    raise ValueError(f"jp not implemented for p = {p}")


def jp_prime(p: int, z):
    """d/dz J_p(z) = J_{p+1}(z)."""
    return jp(p + 1, z)


@dataclass(frozen=True)
class ScaleContext:
    """Scale machinery of `model` at killing rate q (q >= xi* allowed).

    `terms` is the exponential-sum representation of W^(q):
    W^(q)(x) = sum of coef * x^power * exp(rate * x).
    """

    model: LevyModel
    q: float
    beta_plus: float
    beta_minus: float
    merged: bool
    terms: tuple          # ((coef, rate, power), ...)
    w0: float             # W^(q)(0)
    w1: float             # W^(q)'(0+)
    wminus_coef: float    # -c_minus * (beta_plus - beta_minus), see resolvent kernels

    @classmethod
    def build(cls, model: LevyModel, q: float) -> "ScaleContext":
        bp, bm = model.roots(q)
        scale = max(1.0, abs(bp), abs(bm))
        merged = abs(bp - bm) < _MERGE_TOL * scale
        if model.unbounded_variation:
            s2 = model.sigma ** 2
            if merged:
                b0 = 0.5 * (bp + bm)
                terms = ((2.0 / s2, b0, 1),)
                w0, wm = 0.0, 2.0 / s2
            else:
                w = 2.0 / (s2 * (bp - bm))
                terms = ((w, bp, 0), (-w, bm, 0))
                w0, wm = 0.0, 2.0 / s2
            w1 = 2.0 / s2
        else:
            d, nu = model.rep_drift, model.nu
            if merged:
                b0 = 0.5 * (bp + bm)
                terms = (((nu + b0) / d, b0, 1), (1.0 / d, b0, 0))
                wm = (nu + b0) / d
            else:
                ap = (nu + bp) / (d * (bp - bm))
                am = -(nu + bm) / (d * (bp - bm))
                terms = ((ap, bp, 0), (am, bm, 0))
                wm = (nu + bm) / d
            w0 = 1.0 / d
            w1 = (model.lam + q) / d ** 2
        return cls(model=model, q=q, beta_plus=bp, beta_minus=bm, merged=merged,
                   terms=terms, w0=w0, w1=w1, wminus_coef=wm)


def scale_w(ctx: ScaleContext, x: float) -> float:
    """W^(q)(x); zero for x < 0 by the usual support convention."""
    if x < 0:
        return 0.0
    out = 0.0
    for c, r, p in ctx.terms:
        out = out + c * x ** p * np.exp(r * x)
    return out


def scale_w_prime_zero(ctx: ScaleContext) -> float:
    """Right derivative W^(q)'(0+) (2/sigma^2 for Gaussian models)."""
    return ctx.w1


def scale_ew(ctx: ScaleContext, x: float, alpha) -> complex | float:
    """EW(x, alpha) = int_0^x exp(alpha*y) W^(q)(y) dy in closed form."""
    if x <= 0:
        return 0.0
    out = 0.0
    for c, r, p in ctx.terms:
        out = out + c * x ** (p + 1) * jp(p, (r + alpha) * x)
    return out


def scale_iw(ctx: ScaleContext, x: float) -> float:
    """int_0^x W^(q)(y) dy."""
    return scale_ew(ctx, x, 0.0)


def scale_w_damped(ctx: ScaleContext, x: float, alpha) -> float:
    """exp(-alpha x) W^(q)(x) with exponents combined per term (no overflow,
    usable as a quadrature integrand out to arbitrary x)."""
    if x < 0:
        return 0.0
    out = 0.0
    for c, r, p in ctx.terms:
        out = out + c * x ** p * np.exp((r - alpha) * x)
    return out


def scale_z_beta(ctx: ScaleContext, beta, x: float):
    """Z^(q, beta)(x) = 1 + (q - phi(beta)) int_0^x exp(-beta*y) W^(q)(y) dy.

    `beta` may be negative (the transform argument -alpha), in which case
    phi(beta) is evaluated on the dual side and alpha must stay below the
    jump-rate bound.
    """
    if x < 0:
        raise DomainError("scale_z_beta needs x >= 0")
    re = beta.real if isinstance(beta, complex) else beta
    if ctx.model.lam > 0 and re <= -ctx.model.nu:
        raise DomainError(f"phi(beta) undefined at beta = {beta}")
    return 1.0 + (ctx.q - ctx.model.phi(beta)) * scale_ew(ctx, x, -beta)


def tilted_w(ctx: ScaleContext, v: float, x: float) -> float:
    """exp(-v*x) W^(q)(x): the scale function under the v-tilted measure."""
    if x < 0:
        return 0.0
    return np.exp(-v * x) * scale_w(ctx, x)


def g1(ctx: ScaleContext, alpha, x: float):
    """First resolvent kernel:
    W(0) + W(x) - e^{-ax} W(0) - a e^{-ax} int_0^x e^{az} W(z) dz."""
    wx = scale_w(ctx, x)
    ea = np.exp(-alpha * x)
    return ctx.w0 + wx - ea * ctx.w0 - alpha * ea * scale_ew(ctx, x, alpha)


def g2(ctx: ScaleContext, alpha, x: float):
    """Second resolvent kernel; collapses to -e^{-ax} int_0^x e^{ay} W(y) dy."""
    return -np.exp(-alpha * x) * scale_ew(ctx, x, alpha)

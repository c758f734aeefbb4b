"""Quasi-stationary machinery: branch-point expansions, limit transforms, densities.

Near the branch point xi* the killed resolvent expands as

    E_x[e^{-alpha X(e_q)}; tau^theta > e_q] = C(alpha, x) + H(alpha, x) sqrt(q - xi*) + o(.)

and the Yaglom limit of X_t conditioned on Parisian survival has Laplace
transform H(alpha, x) / H(0, x).  H and C are produced in closed form by
running the resolvent assembly over `algebra.Expansion` pairs: the inverse
exponent contributes (q*, k*), everything analytic in q contributes a plain
value, and the expansion rules do the rest.  `expansion_fit` recovers the same
coefficients by least squares on resolvent values just above xi* and is the
independent oracle for the closed forms.

The limit law generally has mass below zero (an excursion straddles every
finite time with positive probability); the transform splits exactly into a
part supported on [0, inf) and a sub-zero part, and the density routine
inverts each on its own side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import Expansion, half_of, val_of
from .laplace import euler_inversion
from .models import (LevyModel, ParisianQsdError, SPECTRALLY_POSITIVE,
                     expansion_point, phi_inverse)
from .resolvent import (SnAtoms, SpAtoms, sn_below, sn_total, sp_below, sp_total,
                        classic_survival_resolvent, parisian_resolvent)

__all__ = [
    "DegenerateClockError",
    "NormalizationError",
    "IllConditionedFitError",
    "QsdTransform",
    "ExpansionFit",
    "h_sp",
    "h_sn",
    "edge_expansion",
    "qsd_transform",
    "classical_qsd_transform",
    "classical_qsd_density_sn",
    "expansion_fit",
    "qsd_density",
    "survival_asymptote",
]


class DegenerateClockError(ParisianQsdError):
    """theta <= |xi*|: survival decays at the clock rate, no Yaglom regime."""


class NormalizationError(ParisianQsdError):
    """H(0, x) vanished; the limit transform cannot be normalized."""


class IllConditionedFitError(ParisianQsdError):
    """Least-squares fit residual too large relative to the constant term."""


# ---------------------------------------------------------------------------
# edge atoms
# ---------------------------------------------------------------------------

def _sp_edge_atoms(model: LevyModel, theta: float, ep=None) -> SpAtoms:
    ep = ep or expansion_point(model)
    s_edge = ep.xi_star + theta
    return SpAtoms(model=model, q=ep.xi_star,
                   Phi_q=Expansion(ep.q_star, ep.k_star),
                   Phi_s=phi_inverse(model, s_edge, ep))


def _sn_edge_atoms(model: LevyModel, theta: float, ep=None) -> SnAtoms:
    ep = ep or expansion_point(model)
    bps, bms = model.roots(ep.xi_star + theta)
    if model.unbounded_variation:
        wm = 2.0 / model.sigma ** 2
    else:
        wm = Expansion((model.nu + ep.q_star) / model.rep_drift,
                       -ep.k_star / model.rep_drift)
    return SnAtoms(model=model, q=ep.xi_star, theta=theta,
                   Phi_q=Expansion(ep.q_star, ep.k_star),
                   Phi_s=bps,
                   beta_minus_q=Expansion(ep.q_star, -ep.k_star),
                   beta_minus_s=bms,
                   wm=wm)


def edge_expansion(model: LevyModel, alpha, x: float, theta: float, ep=None):
    """(C, H, H_below) of the Parisian resolvent at the branch point."""
    ep = ep or expansion_point(model)
    if model.kind == SPECTRALLY_POSITIVE:
        at = _sp_edge_atoms(model, theta, ep)
        total = sp_total(at, alpha, x)
        below = sp_below(at, alpha, x)
    else:
        at = _sn_edge_atoms(model, theta, ep)
        total = sn_total(at, alpha, x)
        below = sn_below(at, alpha, x)
    return val_of(total), half_of(total), half_of(below)


def edge_below(model: LevyModel, alpha, x: float, theta: float, ep=None):
    """H_below alone (pole-free on depth-inversion contours)."""
    ep = ep or expansion_point(model)
    if model.kind == SPECTRALLY_POSITIVE:
        below = sp_below(_sp_edge_atoms(model, theta, ep), alpha, x)
    else:
        below = sn_below(_sn_edge_atoms(model, theta, ep), alpha, x)
    return half_of(below)


def h_sp(model: LevyModel, alpha, x: float, theta: float):
    """Square-root coefficient H(alpha, x) for spectrally positive models."""
    if model.kind != SPECTRALLY_POSITIVE:
        raise ParisianQsdError("h_sp needs a spectrally positive model")
    _check_edge_pole(model, alpha, theta)
    return edge_expansion(model, alpha, x, theta)[1]


def h_sn(model: LevyModel, alpha, x: float, theta: float):
    """Square-root coefficient H(alpha, x) for spectrally negative models."""
    if model.kind == SPECTRALLY_POSITIVE:
        raise ParisianQsdError("h_sn needs a spectrally negative model")
    _check_edge_pole(model, alpha, theta)
    return edge_expansion(model, alpha, x, theta)[1]


def _below_zero_rate(model: LevyModel, theta: float, ep) -> float:
    """Decay rate of the limit law's left tail (first positive transform pole)."""
    s_edge = ep.xi_star + theta
    if model.kind == SPECTRALLY_POSITIVE:
        rate = phi_inverse(model, s_edge, ep)
    else:
        rate = -model.roots(s_edge)[1]
        if model.lam > 0:
            rate = min(rate, model.nu)
    return rate


def _check_edge_pole(model: LevyModel, alpha, theta: float) -> None:
    ep = expansion_point(model)
    rate = _below_zero_rate(model, theta, ep)
    a = val_of(alpha)
    a = a.real if isinstance(a, complex) else a
    if abs(a - rate) < 1e-12 * max(1.0, abs(rate)):
        raise DegenerateClockError(
            f"alpha = {a:g} sits on the transform pole at {rate:g} "
            f"(theta = {theta:g}, xi* = {ep.xi_star:g})")


# ---------------------------------------------------------------------------
# limit transform and density
# ---------------------------------------------------------------------------

@dataclass
class QsdTransform:
    """Normalized Parisian quasi-stationary Laplace transform at start level x."""

    model: LevyModel
    x: float
    theta: float
    h_zero: float
    below_zero_rate: float
    below_mass: float
    branch: str
    _ep: object = field(repr=False, default=None)

    def h_at(self, alpha):
        return edge_expansion(self.model, alpha, self.x, self.theta, self._ep)[1]

    def h_plus(self, alpha):
        _, h, hb = edge_expansion(self.model, alpha, self.x, self.theta, self._ep)
        return h - hb

    def h_minus(self, alpha):
        return edge_below(self.model, alpha, self.x, self.theta, self._ep)

    def normalized(self, alpha):
        return self.h_at(alpha) / self.h_zero


def qsd_transform(model: LevyModel, x: float, theta: float) -> QsdTransform:
    """Build the Yaglom-limit transform; requires theta > |xi*| (else the
    survival tail is clock-dominated and no quasi-stationary limit exists)."""
    ep = expansion_point(model)
    if theta + ep.xi_star <= 0:
        raise DegenerateClockError(
            f"theta = {theta:g} <= |xi*| = {-ep.xi_star:g}: survival decays at "
            "the clock rate and the conditioned process escapes to -infinity")
    _, h0, hb0 = edge_expansion(model, 0.0, x, theta, ep)
    h0 = float(np.real(h0))
    if not math.isfinite(h0) or abs(h0) < 1e-12:
        raise NormalizationError(f"H(0, x) = {h0:g} cannot normalize the transform")
    if h0 < 0:
        raise NormalizationError("H(0, x) must be positive for a survival transform")
    rate = _below_zero_rate(model, theta, ep)
    side = "spectrally-positive" if model.kind == SPECTRALLY_POSITIVE else "spectrally-negative"
    return QsdTransform(model=model, x=x, theta=theta, h_zero=h0,
                        below_zero_rate=rate,
                        below_mass=float(np.real(hb0)) / h0,
                        branch=f"{side}/{model.variation}", _ep=ep)


def classical_qsd_transform(model: LevyModel, alpha):
    """Laplace transform of the classical (non-Parisian) Yaglom limit.

    Spectrally positive: xi* / (xi* - phihat(alpha)).  Spectrally negative:
    the Gamma(2, q*) transform (q* / (q* + alpha))^2 — the exponential tilt
    sits at the minimizer q*, as the fit on the classical resolvent confirms.
    """
    ep = expansion_point(model)
    if model.kind == SPECTRALLY_POSITIVE:
        return ep.xi_star / (ep.xi_star - model.phi(alpha))
    return (ep.q_star / (ep.q_star + alpha)) ** 2


def classical_qsd_density_sn(model: LevyModel, y: float) -> float:
    """Density (q*)^2 y exp(-q* y) of the classical spectrally negative limit."""
    ep = expansion_point(model)
    if y < 0:
        return 0.0
    return ep.q_star ** 2 * y * math.exp(-ep.q_star * y)


@dataclass(frozen=True)
class ExpansionFit:
    c_const: float
    h_coef: float
    residual: float


def expansion_fit(model: LevyModel, x: float, alpha, theta: float,
                  target: str = "parisian",
                  deltas=(1e-4, 1e-5, 1e-6, 1e-7)) -> ExpansionFit:
    """Least-squares fit a + b sqrt(d) + c d to resolvent values at q = xi* + d.

    This is the independent numerical check of the closed-form H coefficients
    (`target="parisian"`), and of the classical limit (`target="classic"`).
    """
    ep = expansion_point(model)
    qs = np.array([ep.xi_star + d for d in deltas])
    if target == "classic":
        vals = np.array([classic_survival_resolvent(model, x, alpha, q).value for q in qs])
    else:
        vals = np.array([parisian_resolvent(model, x, alpha, q, theta).value for q in qs])
    d = np.asarray(deltas)
    design = np.column_stack([np.ones_like(d), np.sqrt(d), d])
    coeffs, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = float(np.linalg.norm(vals - design @ coeffs))
    a, b = float(coeffs[0]), float(coeffs[1])
    if resid > 1e-3 * max(abs(a), 1e-12):
        raise IllConditionedFitError(
            f"fit residual {resid:.3g} vs constant {a:.3g}: transcription bug upstream?")
    return ExpansionFit(c_const=a, h_coef=b, residual=resid)


def qsd_density(model: LevyModel, x: float, theta: float, y_grid,
                m_terms: int = 32, transform: QsdTransform | None = None) -> list:
    """Invert the normalized limit transform to density values on y_grid.

    Positive y: Euler inversion of the [0, inf)-supported part.  Negative y:
    the sub-zero part inverted in depth coordinates (its transform is analytic
    for Re(beta) > -below_zero_rate).  Returns [(y, density), ...].
    """
    tr = transform or qsd_transform(model, x, theta)
    ep = tr._ep or expansion_point(model)
    s_edge = ep.xi_star + theta
    if model.kind == SPECTRALLY_POSITIVE:
        bad_plus = [phi_inverse(model, s_edge, ep)]
        bad_minus = []
    else:
        bp_s, bm_s = model.roots(s_edge)
        bad_plus = [-bm_s] + ([model.nu] if model.lam > 0 else [])
        bad_minus = [bp_s]

    def f_plus(a):
        return tr.h_plus(a) / tr.h_zero

    def f_minus_depth(b):
        return tr.h_minus(-b) / tr.h_zero

    def contour_a(t, bad):
        # keep the real inversion node off removable 0/0 points of the formulas
        a = 18.4
        for _ in range(3):
            x0 = a / (2.0 * t)
            if all(abs(x0 - b) > 1e-5 * max(1.0, abs(b)) for b in bad):
                break
            a += 0.7
        return a

    out = []
    for y in y_grid:
        if y == 0:
            raise ParisianQsdError("density grid must avoid y = 0")
        if y > 0:
            out.append((y, euler_inversion(f_plus, y, m_terms=m_terms,
                                           a=contour_a(y, bad_plus))))
        else:
            out.append((y, euler_inversion(f_minus_depth, -y, m_terms=m_terms,
                                           a=contour_a(-y, bad_minus))))
    return out


def survival_asymptote(model: LevyModel, x: float, theta: float, t: float, alpha=0.0) -> float:
    """Leading large-t approximation of E_x[e^{-alpha X_t}; tau^theta > t].

    The resolvent equals q times the time--Laplace transform, so the
    transform's square-root coefficient at xi* is H/xi*, and the Tauberian
    transfer gives (H/xi*)/Gamma(-1/2) t^{-3/2} e^{xi* t}.
    """
    if t <= 0:
        raise ParisianQsdError("need t > 0")
    ep = expansion_point(model)
    if theta + ep.xi_star <= 0:
        raise DegenerateClockError(
            f"theta = {theta:g} <= |xi*| = {-ep.xi_star:g}: no Tauberian regime")
    h = float(np.real(edge_expansion(model, alpha, x, theta, ep)[1]))
    gamma_neg_half = -2.0 * math.sqrt(math.pi)
    return (h / ep.xi_star) / gamma_neg_half * t ** -1.5 * math.exp(ep.xi_star * t)

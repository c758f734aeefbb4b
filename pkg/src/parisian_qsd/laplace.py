"""Numerical Laplace-transform inversion by Euler-accelerated Bromwich sums."""

from __future__ import annotations

import math

import numpy as np

from .models import ParisianQsdError

__all__ = ["InversionError", "euler_inversion"]


class InversionError(ParisianQsdError):
    """Euler summation failed to settle within tolerance."""


def euler_inversion(transform, t: float, m_terms: int = 32, a: float = 18.4,
                    tol: float = 1e-6) -> float:
    """Invert a one-sided Laplace transform at t > 0.

    Alternating Bromwich series at abscissa a/(2t) with binomial (Euler)
    averaging of the last m_terms//2 partial sums; `a` controls the
    discretisation error (exp(-a) aliasing).  The transform is called at
    complex points.  The difference between consecutive Euler averages is the
    truncation-error estimate; InversionError is raised when it exceeds the
    tolerance by far (support/abscissa mismatch rather than slow convergence).
    """
    if t <= 0:
        raise InversionError("inversion time must be positive")
    n_euler = max(6, m_terms // 2)
    n_sum = m_terms + n_euler + 1
    u = math.exp(a / 2.0) / (2.0 * t)
    x = a / (2.0 * t)
    h = math.pi / t

    terms = np.empty(n_sum + 1)
    terms[0] = 0.5 * np.real(transform(complex(x, 0.0)))
    for k in range(1, n_sum + 1):
        sign = -1.0 if k % 2 else 1.0
        terms[k] = sign * np.real(transform(complex(x, k * h)))
    partial = np.cumsum(terms)

    w = np.array([math.comb(n_euler, j) for j in range(n_euler + 1)], dtype=float)
    w /= 2.0 ** n_euler
    avg0 = 2.0 * u * float(np.dot(w, partial[m_terms - 1:m_terms + n_euler]))
    avg1 = 2.0 * u * float(np.dot(w, partial[m_terms:m_terms + n_euler + 1]))

    value = avg1
    err_est = abs(avg1 - avg0)
    scale = max(1.0, abs(value))
    if not math.isfinite(value):
        raise InversionError(f"non-finite inversion value at t={t:g}")
    if err_est > 100.0 * max(tol * scale, 1e-12):
        raise InversionError(
            f"Euler sum not settling at t={t:g}: successive averages differ by {err_est:.3g}")
    return value

"""Hinge-activation approximation to the two-overlap posterior.

Each neuron responds with ``max(0, w.x - a)`` and the posterior is
approximated by normalizing these responses.  The approximation agrees with
the exact posterior in value and slope at the cell edge but differs at cubic
order, and the cubic mismatch grows without bound as ``M`` increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .codec import DomainError, Regime, make_profile, posterior_eval


@dataclass(frozen=True)
class HingeActivation:
    w: np.ndarray
    a: float

    @classmethod
    def for_neuron(cls, y: int, s: float, M: float) -> "HingeActivation":
        _check(s, M)
        ang = y * 2.0 * math.pi / M
        return cls(np.array([math.cos(ang), math.sin(ang)]), threshold(s, M))

    def __call__(self, theta):
        t = np.asarray(theta, dtype=float)
        return np.maximum(0.0, self.w[0] * np.cos(t) + self.w[1] * np.sin(t) - self.a)


def _check(s: float, M: float) -> None:
    if M < 4.0:
        raise DomainError("M >= 4 required")
    if not (0.0 < s <= math.pi / M * (1.0 + 1e-12)):
        raise DomainError(f"s must lie in (0, pi/M] = (0, {math.pi / M!r}]")


def threshold(s: float, M: float) -> float:
    p = math.pi / M
    return math.cos(p) - math.sin(p) * math.sin(s)


def activation_eval(y: int, theta, s: float, M: float):
    out = HingeActivation.for_neuron(y, s, M)(theta)
    return float(out) if out.ndim == 0 else out


def approx_posterior(theta, s: float, M: float, y: int = 0):
    """Normalized hinge response of neuron ``y``."""
    _check(s, M)
    th = np.asarray(theta, dtype=float)
    d = 2.0 * math.pi / M
    a = threshold(s, M)
    k = np.rint(th / d)
    pos = k[..., None] + np.arange(-2, 3)
    q = np.maximum(0.0, np.cos(th[..., None] - pos * d) - a)
    total = q.sum(axis=-1)
    if np.any(total <= 0.0):
        raise DomainError("no neuron responds; the threshold leaves a gap between cells")
    qy = np.maximum(0.0, np.cos(th - y * d) - a)
    out = qy / total
    return float(out) if out.ndim == 0 else out


def exact_cubic(s: float, M: float) -> float:
    """Cubic coefficient of the exact posterior about the cell edge."""
    return 1.0 / (12.0 * math.sin(s))


def approx_cubic(s: float, M: float) -> float:
    """Cubic coefficient of the hinge approximation about the cell edge."""
    return (1.0 / math.sin(s) - 3.0 / (math.tan(math.pi / M) * math.sin(s) ** 2)) / 12.0


@dataclass(frozen=True)
class ApproxError:
    sup_error: float
    theta_at_sup: float
    exact_cubic: float
    approx_cubic: float


def _exact(s: float, M: float):
    return make_profile(2.0 * math.pi / M, s, Regime.TWO_OVERLAP)


def approx_error(s: float, M: float, points: int = 10_000) -> ApproxError:
    """Largest ``|p_exact - p_approx|`` over the transition ``|theta - pi/M| <= s``.

    A dense scan locates the worst point, then a bounded scalar search
    refines it within one grid cell.
    """
    _check(s, M)
    prof = _exact(s, M)
    p = math.pi / M
    err = lambda t: np.abs(posterior_eval(prof, t) - approx_posterior(t, s, M))
    grid = np.linspace(p - s, p + s, points)
    e = err(grid)
    i = int(np.argmax(e))
    step = grid[1] - grid[0]
    lo, hi = max(p - s, grid[i] - step), min(p + s, grid[i] + step)
    res = minimize_scalar(lambda t: -err(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best_t, best = (float(res.x), float(-res.fun)) if -res.fun > e[i] else (float(grid[i]), float(e[i]))
    return ApproxError(best, best_t, exact_cubic(s, M), approx_cubic(s, M))


def discrepancy_exponent(s: float, M: float, points: int = 200) -> float:
    """Log-log slope of ``|p_exact - p_approx|`` against ``|theta - pi/M|``.

    Fitted on the inner half of the transition, where the leading mismatch
    is expected to be cubic.
    """
    _check(s, M)
    prof = _exact(s, M)
    p = math.pi / M
    h = np.geomspace(s / 100.0, s / 2.0, points)
    e = np.abs(posterior_eval(prof, p + h) - approx_posterior(p + h, s, M))
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)

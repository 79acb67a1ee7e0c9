"""Closed-form optima: the overlap width ``s``, the reference length ``r`` and
the minimum of ``D1 + D2``.

Joint torus problems reduce to a circle with ``sqrt(M)`` neurons and twice the
distortion.  Factorial torus problems have their own closed forms, which are
the circle forms with ``M -> M/2`` and a reweighted ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import bisect

from .codec import DomainError, Manifold, ProblemSpec, Regime, regime_interval


class SolverError(RuntimeError):
    """No unique bracketed root; carries the endpoint residuals of both regimes."""

    def __init__(self, message: str, residuals: dict[str, tuple[float, float]]):
        super().__init__(message)
        self.residuals = residuals


def _need_n_above_one(spec: ProblemSpec) -> None:
    if spec.n <= 1.0:
        raise DomainError("n > 1 required; use asymptotics.limit_n1 for n = 1")


def _circle_view(spec: ProblemSpec) -> tuple[float, float]:
    """Neuron count and half spacing ``P`` of the circle the equations live on."""
    m = spec.m_eff
    return m, math.pi / m


def residual_s(spec: ProblemSpec, s, regime: Regime):
    """Left-hand side of the transcendental equation fixing the optimum ``s``.

    Vectorized over ``s``.  The sign is negative below the root and positive
    above it in both regimes.
    """
    _need_n_above_one(spec)
    regime = Regime(regime)
    n = spec.n
    m, p = _circle_view(spec)
    s = np.asarray(s, dtype=float)
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        # factorial forms: M/2 neurons per circle, weights (n-1)/(n+1) and (n-1)/(2n)
        w2 = (n - 1.0) / (n + 1.0)
        w3a, w3b = 1.0 / n, (n - 1.0) / (2.0 * n)
    else:
        w2 = (n - 1.0) / n
        w3a, w3b = 1.0 / n, (n - 1.0) / n
    if regime is Regime.TWO_OVERLAP:
        out = np.sin(s) / math.sin(p) - w2 * (m / math.pi) * math.sin(p) * (
            np.cos(s) + s * np.sin(s)
        )
    else:
        u = 2.0 * p - s
        out = w3a * np.cos(u) / math.cos(p) - w3b * (m / math.pi) * math.cos(p) * (
            np.sin(u) - u * np.cos(u)
        )
    return float(out) if out.ndim == 0 else out


def _sign_changes(f, lo: float, hi: float, probes: int = 65) -> int:
    v = f(np.linspace(lo, hi, probes))
    sg = np.sign(v)
    sg = sg[sg != 0]
    return int(np.count_nonzero(np.diff(sg)))


def _refine(f, lo: float, hi: float) -> float:
    x0 = bisect(f, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    f0 = f(x0)
    if f0 == 0.0:
        return x0
    # one secant step from a nearby point
    x1 = x0 + (1e-9 if x0 + 1e-9 <= hi else -1e-9)
    f1 = f(x1)
    if f1 != f0:
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if lo <= x2 <= hi and abs(f(x2)) <= abs(f0):
            return x2
    return x0


def solve_s(spec: ProblemSpec) -> tuple[float, Regime]:
    """Optimal overlap half-width and the regime it falls in."""
    _need_n_above_one(spec)
    half = 0.5 * spec.delta
    r_two = lambda s: residual_s(spec, s, Regime.TWO_OVERLAP)
    r_three = lambda s: residual_s(spec, s, Regime.THREE_OVERLAP)
    at_half = r_two(half)
    if at_half >= 0.0:
        regime, f = Regime.TWO_OVERLAP, r_two
    else:
        regime, f = Regime.THREE_OVERLAP, r_three
    lo, hi = regime_interval(spec.delta, regime)
    flo, fhi = f(lo), f(hi)
    if fhi == 0.0:
        return hi, regime
    if flo * fhi > 0.0 or _sign_changes(f, lo, hi) != 1:
        d = spec.delta
        raise SolverError(
            f"no unique root for {spec}",
            {
                "two": (r_two(0.0), at_half),
                "three": (r_three(0.5 * d), r_three(d)),
            },
        )
    return _refine(f, lo, hi), regime


def optimal_r(spec: ProblemSpec, s: float, regime: Regime) -> float:
    """Optimal reference-vector length at overlap half-width ``s``."""
    _need_n_above_one(spec)
    n = spec.n
    _, p = _circle_view(spec)
    scale = n / (n - 1.0)
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        scale *= 2.0
    if Regime(regime) is Regime.TWO_OVERLAP:
        return scale * math.sin(s) / math.sin(p)
    return scale * math.cos(2.0 * p - s) / math.cos(p)


def _circle_d(m: float, n: float, s: float, regime: Regime) -> float:
    g = m / math.pi
    if regime is Regime.TWO_OVERLAP:
        return 2.0 - n / (n - 1.0) * (g / 2.0) * (2.0 * s + math.sin(2.0 * s))
    sec2 = 1.0 / math.cos(math.pi / m) ** 2
    den = 2.0 * (n - 1.0) ** 2
    first = n * ((n - 1.0) * (2.0 * (n - 2.0) / n - g * s) - sec2) / den
    second = n * ((n - 1.0) * (2.0 - g * s) + sec2) / den
    return first - second * math.cos(4.0 * math.pi / m - 2.0 * s)


def _factorial_d(M: float, n: float, s: float, regime: Regime) -> float:
    g = M / (2.0 * math.pi)
    if regime is Regime.TWO_OVERLAP:
        return 4.0 - n / (n - 1.0) * g * (2.0 * s + math.sin(2.0 * s))
    sec2 = 1.0 / math.cos(2.0 * math.pi / M) ** 2
    den = (n - 1.0) ** 2
    first = n * ((n - 1.0) * (2.0 * (n - 2.0) / n - g * s) - 2.0 * sec2) / den
    second = n * ((n - 1.0) * (2.0 - g * s) + 2.0 * sec2) / den
    return first - second * math.cos(8.0 * math.pi / M - 2.0 * s)


def objective_closed_form(spec: ProblemSpec, s: float, regime: Regime) -> float:
    """Minimum ``D1 + D2``.  Only valid when ``s`` is the optimum for ``spec``."""
    regime = Regime(regime)
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        return _factorial_d(spec.M, spec.n, s, regime)
    d = _circle_d(spec.m_eff, spec.n, s, regime)
    return 2.0 * d if spec.manifold is Manifold.TORUS_JOINT else d


def n1_closed_form(spec: ProblemSpec) -> tuple[float, float]:
    """``(r, D1 + D2)`` at a single firing event: hard vector quantization."""
    m = spec.m_eff
    r = (m / math.pi) * math.sin(math.pi / m)
    d = 2.0 - 2.0 * r * r
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        d += 2.0
    elif spec.manifold is Manifold.TORUS_JOINT:
        d *= 2.0
    return r, d


@dataclass(frozen=True)
class Solution:
    """Analytic optimum.

    ``d_total`` comes from the closed form.  The split into ``d1`` and ``d2``
    is not available in closed form; it is integrated numerically on first
    access and cached.
    """

    spec: ProblemSpec
    regime: Regime
    s: float
    r: float
    d_total: float

    @cached_property
    def _split(self) -> tuple[float, float]:
        from .codec import build_profile
        from .oracle import quadrature_objective

        q = quadrature_objective(build_profile(self.spec, self.s, self.regime), self.r, self.spec)
        return q.d1, q.d2

    @property
    def d1(self) -> float:
        return self._split[0]

    @property
    def d2(self) -> float:
        return self._split[1]

    @property
    def s_normalized(self) -> float:
        """``s`` in units of half the neuron spacing (``pi / M_eff``)."""
        return self.s / (0.5 * self.spec.delta)


def solve(spec: ProblemSpec) -> Solution:
    if spec.n == 1.0:
        r, d = n1_closed_form(spec)
        return Solution(spec, Regime.TWO_OVERLAP, 0.0, r, d)
    s, regime = solve_s(spec)
    return Solution(
        spec,
        regime,
        s,
        optimal_r(spec, s, regime),
        objective_closed_form(spec, s, regime),
    )

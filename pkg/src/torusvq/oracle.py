"""Independent numerical checks of the closed forms.

Everything here works from the posterior profile and reference layout alone:
the objective is integrated directly, both stationarity conditions are
evaluated as residuals, the optimum is located by a derivative-free search,
and a seeded Monte Carlo estimator gives a statistically independent value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .codec import (
    DomainError,
    Manifold,
    PosteriorProfile,
    ProblemSpec,
    Regime,
    build_profile,
    neighbour_weights,
    posterior_eval,
    regime_interval,
)
from .solver import Solution, optimal_r

_LOW, _HIGH = 16, 32
_NODES = {q: np.polynomial.legendre.leggauss(q) for q in (_LOW, _HIGH)}


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class QuadratureResult:
    d1: float
    d2: float
    abs_error_estimate: float
    segments_used: int

    @property
    def d_total(self) -> float:
        return self.d1 + self.d2


@dataclass(frozen=True)
class MCEstimate:
    d1_hat: float
    d2_hat: float
    d1_se: float
    d2_se: float
    d_total_se: float
    samples: int
    seed: int

    @property
    def d_total_hat(self) -> float:
        return self.d1_hat + self.d2_hat


def _gauss(fn, a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    x, w = _NODES[q]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = mid[:, None] + half[:, None] * x[None, :]
    vals = fn(t.ravel()).reshape(t.shape + (-1,))
    return half[:, None] * np.einsum("j,ijk->ik", w, vals)


def integrate(fn, cuts, tol: float = 1e-13, max_segments: int = 20000):
    """Adaptive Gauss-Legendre integration of a vector-valued ``fn``.

    ``fn`` maps a 1-D array of abscissae to an array of shape ``(N, k)``.
    ``cuts`` are sorted segment endpoints; the integrand is assumed smooth
    between them.  Each segment compares a 16- and a 32-point rule and is
    halved until the summed error estimate is within ``tol``.
    Returns ``(integral, error_estimate, segments_used)``.
    """
    cuts = np.unique(np.asarray(cuts, dtype=float))
    a, b = cuts[:-1], cuts[1:]
    span = cuts[-1] - cuts[0]
    total = None
    err_total = 0.0
    used = 0
    while a.size:
        hi = _gauss(fn, a, b, _HIGH)
        err = np.max(np.abs(hi - _gauss(fn, a, b, _LOW)), axis=1)
        ok = err <= tol * (b - a) / span
        used += a.size
        if used > max_segments:
            ok[:] = True
        part = hi[ok].sum(axis=0)
        total = part if total is None else total + part
        err_total += float(err[ok].sum())
        if used > max_segments:
            raise QuadratureError(f"tolerance {tol} not reached", (total, err_total))
        a, b = a[~ok], b[~ok]
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    return total, err_total, used


def _mix(spec: ProblemSpec) -> float:
    """Weight of the mean reconstruction: 1 on a circle, 1/2 for factorial coding."""
    return 0.5 if spec.manifold is Manifold.TORUS_FACTORIAL else 1.0


def _integrands(profile: PosteriorProfile, r: float, spec: ProblemSpec):
    h = _mix(spec)

    def fn(theta):
        idx, w = neighbour_weights(profile, theta, reach=1)
        ang = idx * profile.delta
        cx, cy = np.cos(theta), np.sin(theta)
        xr, yr = r * np.cos(ang), r * np.sin(ang)
        g1 = np.sum(w * ((cx[:, None] - xr) ** 2 + (cy[:, None] - yr) ** 2), axis=1)
        mx, my = np.sum(w * xr, axis=1), np.sum(w * yr, axis=1)
        g2 = (cx - h * mx) ** 2 + (cy - h * my) ** 2
        return np.stack([g1, g2], axis=1)

    return fn


def _combine(g1: float, g2: float, spec: ProblemSpec) -> tuple[float, float]:
    n = spec.n
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        return 2.0 / n * (g1 + 1.0), 4.0 * (n - 1.0) / n * g2
    d1, d2 = 2.0 / n * g1, 2.0 * (n - 1.0) / n * g2
    if spec.manifold is Manifold.TORUS_JOINT:
        return 2.0 * d1, 2.0 * d2
    return d1, d2


def _period(profile: PosteriorProfile) -> tuple[float, float, range]:
    """Integration window and the neurons whose kinks fall inside it.

    With an integer neuron count the whole circle is used.  Otherwise the
    layout does not close up, and the average over one cell centred on a
    neuron stands in for the period average.
    """
    m = profile.m_eff
    if abs(m - round(m)) < 1e-9:
        return 0.0, 2.0 * math.pi, range(-1, round(m) + 2)
    half = profile.half_spacing
    return -half, half, range(-2, 3)


def _cuts(profile: PosteriorProfile, lo: float, hi: float, neurons) -> np.ndarray:
    marks = (0.0,) + profile.breakpoints
    pts = [y * profile.delta + sg * b for y in neurons for b in marks for sg in (1.0, -1.0)]
    pts = np.array([lo, hi] + pts)
    return np.unique(pts[(pts >= lo) & (pts <= hi)])


def quadrature_objective(
    profile: PosteriorProfile, r: float, spec: ProblemSpec, tol: float = 1e-13
) -> QuadratureResult:
    """``D1`` and ``D2`` by direct integration over the input circle."""
    if abs(profile.delta - spec.delta) > 1e-12 * spec.delta:
        raise DomainError("profile spacing does not match the problem")
    lo, hi, neurons = _period(profile)
    width = hi - lo
    val, err, used = integrate(_integrands(profile, r, spec), _cuts(profile, lo, hi, neurons), tol * width)
    d1, d2 = _combine(val[0] / width, val[1] / width, spec)
    scale = 4.0 * max(1.0, 2.0 / spec.n)
    return QuadratureResult(float(d1), float(d2), float(scale * err / width), used)


def quadrature_folded(profile: PosteriorProfile, r: float, spec: ProblemSpec) -> tuple[float, float]:
    """Same objective via the half-cell ``[0, pi/M_eff]`` and mirror symmetry.

    Uses scipy's adaptive quadrature so that it shares no integration code
    with :func:`quadrature_objective`.
    """
    fn = _integrands(profile, r, spec)
    half = profile.half_spacing
    pts = [b for b in profile.breakpoints if 0.0 < b < half]
    pts += [profile.delta - b for b in profile.breakpoints if 0.0 < profile.delta - b < half]
    out = []
    for j in (0, 1):
        v, _ = quad(
            lambda t: fn(np.array([t]))[0, j], 0.0, half, points=pts or None,
            epsabs=1e-14, epsrel=1e-13, limit=200,
        )
        out.append(v / half)
    return _combine(out[0], out[1], spec)


def _mean_field(spec: ProblemSpec) -> float:
    """Coefficient of the mean reconstruction in both stationarity conditions."""
    c = spec.n - 1.0
    return 0.5 * c if spec.manifold is Manifold.TORUS_FACTORIAL else c


def stationarity_residual_P(
    profile: PosteriorProfile, r: float, spec: ProblemSpec, theta: float, y: int = 0
) -> float:
    """Residual of the posterior stationarity condition at input angle ``theta``.

    Sums ``(Pr(y'|x) - [y' == y]) x'(y') . (x'(y')/2 - n x + c sum Pr x')`` over
    the active neurons, which vanishes when every active neuron has the same
    marginal cost.
    """
    if posterior_eval(profile, theta - y * profile.delta) <= 0.0:
        raise DomainError(f"neuron {y} is inactive at theta={theta!r}")
    idx, w = neighbour_weights(profile, np.array([theta]), reach=2)
    idx, w = idx[0], w[0]
    ang = idx * profile.delta
    xr = r * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    x = np.array([math.cos(theta), math.sin(theta)])
    mean = w @ xr
    cost = np.einsum("ij,ij->i", xr, 0.5 * xr - spec.n * x + _mean_field(spec) * mean)
    offset = np.mod((idx - y) * profile.delta + math.pi, 2.0 * math.pi) - math.pi
    delta_y = (np.abs(offset) < 1e-9).astype(float)
    return float(np.sum((w - delta_y) * cost))


def stationarity_residual_X(solution: Solution, y: int = 0, tol: float = 1e-13) -> np.ndarray:
    """Reference-vector stationarity residual for neuron ``y``.

    Returns ``n <x>_y - x'(y) - c <sum Pr x'>_y`` where ``<.>_y`` averages over
    inputs weighted by ``Pr(y|x)``.
    """
    spec = solution.spec
    profile = build_profile(spec, solution.s, solution.regime)
    r = solution.r
    centre = y * profile.delta
    reach = profile.support

    def fn(theta):
        idx, w = neighbour_weights(profile, theta, reach=1)
        ang = idx * profile.delta
        py = posterior_eval(profile, theta - centre)
        mx = r * np.sum(w * np.cos(ang), axis=1)
        my = r * np.sum(w * np.sin(ang), axis=1)
        return np.stack([py, py * np.cos(theta), py * np.sin(theta), py * mx, py * my], axis=1)

    marks = (0.0,) + profile.breakpoints
    cuts = [centre + j * profile.delta + sg * b for j in range(-2, 3) for b in marks for sg in (1.0, -1.0)]
    cuts = [c for c in cuts if centre - reach <= c <= centre + reach]
    val, _, _ = integrate(fn, [centre - reach, centre + reach] + cuts, tol)
    mass = val[0]
    lhs = spec.n * val[1:3] / mass
    xref = r * np.array([math.cos(centre), math.sin(centre)])
    return lhs - xref - _mean_field(spec) * val[3:5] / mass


def numeric_minimize_s(spec: ProblemSpec, regime: Regime, xtol: float = 1e-10) -> tuple[float, float]:
    """Golden-section search for the ``s`` minimizing integrated ``D1 + D2``.

    ``r`` follows the closed-form optimum at each trial ``s``.
    """
    regime = Regime(regime)

    def cost(s: float) -> float:
        prof = build_profile(spec, s, regime)
        return quadrature_objective(prof, optimal_r(spec, s, regime), spec).d_total

    a, b = regime_interval(spec.delta, regime)
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = cost(c), cost(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = cost(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = cost(d)
    s = 0.5 * (a + b)
    return s, cost(s)


def _window(profile: PosteriorProfile) -> tuple[float, float]:
    lo, hi, _ = _period(profile)
    return lo, hi


def mc_estimate(
    profile: PosteriorProfile,
    r: float,
    spec: ProblemSpec,
    samples: int = 1_000_000,
    seed: int = 0,
    chunk: int = 1 << 16,
) -> MCEstimate:
    """Monte Carlo estimate of ``D1`` and ``D2`` with standard errors.

    Inputs are drawn uniformly from the integration window.  Chunk ``i`` uses
    its own PCG64 stream seeded by ``(seed, i)``, so the result depends only on
    ``seed``, ``samples`` and ``chunk``.
    """
    if samples < 100:
        raise DomainError("samples >= 100 required")
    lo, hi = _window(profile)
    fn = _integrands(profile, r, spec)
    n = spec.n
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        k1, k2, c1 = 2.0 / n, 4.0 * (n - 1.0) / n, 2.0 / n
    else:
        k = 2.0 if spec.manifold is Manifold.TORUS_JOINT else 1.0
        k1, k2, c1 = k * 2.0 / n, k * 2.0 * (n - 1.0) / n, 0.0
    count, mean, m2 = 0, np.zeros(3), np.zeros(3)
    for i in range((samples + chunk - 1) // chunk):
        size = min(chunk, samples - count)
        rng = np.random.default_rng([seed, i])
        g = fn(rng.uniform(lo, hi, size))
        t1 = k1 * g[:, 0] + c1
        t2 = k2 * g[:, 1]
        block = np.stack([t1, t2, t1 + t2], axis=1)
        bmean = block.mean(axis=0)
        bm2 = ((block - bmean) ** 2).sum(axis=0)
        # pairwise merge of running moments
        tot = count + size
        diff = bmean - mean
        mean = mean + diff * (size / tot)
        m2 = m2 + bm2 + diff**2 * (count * size / tot)
        count = tot
    se = np.sqrt(m2 / (samples - 1) / samples)
    return MCEstimate(
        float(mean[0]), float(mean[1]), float(se[0]), float(se[1]), float(se[2]), samples, seed
    )

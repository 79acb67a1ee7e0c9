"""Problem description, piecewise-sinusoidal posteriors and reference geometry.

Every optimal single-neuron posterior on a circle is an even function of the
angle to the neuron's preferred direction.  On each piece it has the form
``a + b*cos(theta) + c*sin(|theta|)``, which is an affine function of the
input ``x = (cos theta, sin theta)``.  Only the ``|theta| >= 0`` branch is
stored; evaluation reduces ``theta`` to ``(-pi, pi]`` and takes its absolute
value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside the domain where a formula holds."""


class Manifold(str, enum.Enum):
    CIRCLE = "circle"
    TORUS_JOINT = "torus-joint"
    TORUS_FACTORIAL = "torus-factorial"


class Regime(str, enum.Enum):
    TWO_OVERLAP = "two"
    THREE_OVERLAP = "three"


# Joint encoding of the torus is mapped onto a circle with sqrt(M) neurons.
# The joint-vs-factorial comparison starts where factorial coding becomes
# valid (M/2 >= 4), so joint problems are accepted from the same M.
MIN_M_EFF = 4.0
MIN_M_JOINT = 8.0


@dataclass(frozen=True)
class ProblemSpec:
    """Manifold kind, neuron count ``M`` and firing-event count ``n``.

    ``M`` and ``n`` are real-valued.  The per-circle neuron count ``m_eff``
    is ``M`` for a circle, ``sqrt(M)`` for joint torus encoding and ``M/2``
    for factorial torus encoding.
    """

    manifold: Manifold
    M: float
    n: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "manifold", Manifold(self.manifold))
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "n", float(self.n))
        if not (math.isfinite(self.M) and math.isfinite(self.n)):
            raise DomainError("M and n must be finite")
        if self.n < 1.0:
            raise DomainError(f"n >= 1 required (got n={self.n!r})")
        if self.manifold is Manifold.CIRCLE and self.M < MIN_M_EFF:
            raise DomainError(f"M >= 4 required (got M={self.M!r})")
        if self.manifold is Manifold.TORUS_FACTORIAL and self.M / 2.0 < MIN_M_EFF:
            raise DomainError(f"M/2 ≥ 4 required (got M={self.M!r})")
        if self.manifold is Manifold.TORUS_JOINT and self.M < MIN_M_JOINT:
            raise DomainError(f"M >= 8 required for joint encoding (got M={self.M!r})")

    @property
    def m_eff(self) -> float:
        if self.manifold is Manifold.TORUS_JOINT:
            return math.sqrt(self.M)
        if self.manifold is Manifold.TORUS_FACTORIAL:
            return self.M / 2.0
        return self.M

    @property
    def delta(self) -> float:
        """Angular spacing between neighbouring neurons on one circle."""
        return 2.0 * math.pi / self.m_eff

    @property
    def is_torus(self) -> bool:
        return self.manifold is not Manifold.CIRCLE


@dataclass(frozen=True)
class Piece:
    """One sinusoidal piece ``a + b*cos(t) + c*sin(t)`` valid for ``lo <= t <= hi``.

    ``centre`` marks a piece that can be written ``a + amp*sin(centre - t)``;
    that form is used for evaluation because it stays accurate when ``b`` and
    ``c`` are huge and nearly cancel (a very narrow transition).
    """

    lo: float
    hi: float
    a: float
    b: float
    c: float
    centre: float | None = field(default=None, compare=False, repr=False)
    amp: float = field(default=0.0, compare=False, repr=False)

    def __call__(self, t):
        if self.centre is not None:
            return self.a + self.amp * np.sin(self.centre - t)
        return self.a + self.b * np.cos(t) + self.c * np.sin(t)


@dataclass(frozen=True)
class PosteriorProfile:
    delta: float
    s: float
    regime: Regime
    pieces: tuple[Piece, ...]
    breakpoints: tuple[float, ...]

    @property
    def half_spacing(self) -> float:
        return 0.5 * self.delta

    @property
    def support(self) -> float:
        """Largest ``|theta|`` with a nonzero posterior."""
        return self.half_spacing + self.s

    @property
    def m_eff(self) -> float:
        return 2.0 * math.pi / self.delta


@dataclass(frozen=True)
class ReferenceLayout:
    r: float
    m_eff: float

    @property
    def delta(self) -> float:
        return 2.0 * math.pi / self.m_eff


def regime_interval(delta: float, regime: Regime) -> tuple[float, float]:
    half = 0.5 * delta
    if Regime(regime) is Regime.TWO_OVERLAP:
        return 0.0, half
    return half, delta


def _check_s(delta: float, s: float, regime: Regime) -> None:
    lo, hi = regime_interval(delta, regime)
    slack = 1e-12 * delta
    if not (lo - slack <= s <= hi + slack):
        raise DomainError(
            f"s={s!r} outside the {Regime(regime).value}-overlap interval [{lo!r}, {hi!r}]"
        )


def two_overlap_pieces(half: float, s: float) -> tuple[Piece, ...]:
    plateau = Piece(0.0, half - s, 1.0, 0.0, 0.0)
    if s == 0.0:
        return (plateau,)
    k = 0.5 / math.sin(s)
    # 1/2 + sin(half - t) / (2 sin s), expanded into cos/sin of t
    ramp = Piece(half - s, half + s, 0.5, k * math.sin(half), -k * math.cos(half), centre=half, amp=k)
    return (plateau, ramp)


def three_overlap_pieces(half: float, s: float) -> tuple[Piece, ...]:
    p = half
    k = 1.0 / math.cos(2.0 * p - s)
    csc2 = 1.0 / math.sin(p) ** 2
    f1 = Piece(
        0.0,
        s - p,
        -0.25 * (math.cos(4.0 * p - s) + math.cos(s)) * csc2 * k,
        0.5 * math.cos(p) * csc2 * k,
        0.0,
    )
    f2 = Piece(
        s - p,
        3.0 * p - s,
        0.5,
        0.5 * math.cos(p) * k,
        -0.5 * math.cos(p) / math.tan(p) * k,
    )
    f3 = Piece(
        3.0 * p - s,
        p + s,
        0.25 * csc2,
        -0.25 * csc2 * k * math.cos(3.0 * p),
        -0.25 * csc2 * k * math.sin(3.0 * p),
    )
    return (f1, f2, f3)


def make_profile(delta: float, s: float, regime: Regime) -> PosteriorProfile:
    """Posterior with neuron spacing ``delta``; see :func:`build_profile`."""
    regime = Regime(regime)
    _check_s(delta, s, regime)
    lo, hi = regime_interval(delta, regime)
    s = min(max(float(s), lo), hi)
    half = 0.5 * delta
    if half + s == half:
        # narrower than float resolution at the cell edge
        s = 0.0
    if regime is Regime.TWO_OVERLAP:
        pieces = two_overlap_pieces(half, s)
    else:
        pieces = three_overlap_pieces(half, s)
    breakpoints = tuple(sorted({pc.hi for pc in pieces} | {pc.lo for pc in pieces if pc.lo > 0}))
    return PosteriorProfile(delta, s, regime, pieces, breakpoints)


def build_profile(spec: ProblemSpec, s: float, regime: Regime) -> PosteriorProfile:
    """Optimal-form posterior for the given overlap half-width and regime.

    Two-overlap profiles are 1 on a plateau and cross 1/2 at the cell edge
    through a single sinusoidal ramp; ``s = 0`` gives the indicator of the
    cell.  Three-overlap profiles have three pieces, the innermost shared by
    three neurons.
    """
    return make_profile(spec.delta, s, regime)


def wrap_angle(theta):
    """Reduce angles to the principal interval ``(-pi, pi]``."""
    return math.pi - np.mod(math.pi - np.asarray(theta, dtype=float), 2.0 * math.pi)


def posterior_eval(profile: PosteriorProfile, theta):
    """Evaluate ``p(theta)``; accepts scalars or arrays."""
    # reduce |theta| directly so that p(theta) == p(-theta) bit for bit
    t = np.mod(np.abs(np.asarray(theta, dtype=float)), 2.0 * math.pi)
    t = np.minimum(t, 2.0 * math.pi - t)
    conds = [t <= pc.hi for pc in profile.pieces]
    vals = [pc(t) for pc in profile.pieces]
    out = np.select(conds, vals, default=0.0)
    out = np.where(t >= profile.support, 0.0, out)
    if profile.s == 0.0:
        # zero-width overlap: neighbouring indicators meet at the cell edge
        out = np.where(t == profile.half_spacing, 0.5, out)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def neighbour_weights(profile: PosteriorProfile, theta, reach: int = 2):
    """Posterior weights of the neurons nearest to each ``theta``.

    Returns ``(offsets, weights)`` where ``offsets`` has shape ``(..., 2*reach+1)``
    giving neuron positions ``k + j`` relative to the nearest neuron ``k`` and
    ``weights`` holds ``p(theta - (k + j) * delta)``.  This is exact whenever the
    support is narrower than ``(reach + 1/2) * delta``, and does not require an
    integer neuron count.
    """
    th = np.asarray(theta, dtype=float)
    k = np.rint(th / profile.delta)
    js = np.arange(-reach, reach + 1)
    idx = k[..., None] + js
    w = posterior_eval(profile, th[..., None] - idx * profile.delta)
    return idx, np.asarray(w)


def posterior_all(profile: PosteriorProfile, theta: float) -> list[tuple[int, float]]:
    """All neurons with nonzero posterior at ``theta`` as ``(index, probability)`` pairs."""
    th = float(wrap_angle(theta))
    idx, w = neighbour_weights(profile, th)
    m = profile.m_eff
    m_int = round(m)
    periodic = abs(m - m_int) < 1e-9
    out = []
    for y, p in zip(idx.tolist(), w.tolist()):
        if p > 0.0:
            out.append((int(y) % m_int if periodic else int(y), float(p)))
    return sorted(out)


def reference_vector(y: int, layout: ReferenceLayout) -> np.ndarray:
    """Reference vector of neuron ``y``: a vertex of a regular polygon of radius ``r``."""
    ang = y * layout.delta
    return layout.r * np.array([math.cos(ang), math.sin(ang)])

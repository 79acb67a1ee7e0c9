"""Series expansions, special limits and regime boundaries."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .codec import DomainError, Manifold, ProblemSpec
from .solver import n1_closed_form


class Validity(str, enum.Enum):
    LARGE_M = "large-M"
    N_EQUALS_ONE = "n=1"
    LARGE_N = "large-n"
    LINEAR_MANIFOLD = "linear-manifold"


@dataclass(frozen=True)
class AsymptoticTriple:
    s: float
    r: float
    d_total: float
    validity: Validity


def _circle_large_M(m: float, n: float) -> tuple[float, float, float]:
    e = math.pi / m
    s = (n - 1) / n * e + (n - 1) * (n * n - 4 * n + 2) / (3 * n**3) * e**3
    r = 1 + (2 * n * n - 6 * n + 3) / (6 * n * n) * e * e
    d = 2 * (2 * n - 1) / (3 * n * n) * e * e
    return s, r, d


def _circle_large_n(m: float, n: float) -> tuple[float, float, float]:
    e = math.pi / m
    q = 3 * math.pi / (m * n * math.cos(e) ** 2)
    s = 2 * e - q ** (1 / 3)
    r = 0.5 * (2 - q ** (2 / 3)) / math.cos(e)
    d = 2 / n * math.tan(e) ** 2
    return s, r, d


def expand_large_M(spec: ProblemSpec) -> AsymptoticTriple:
    """Leading terms of the inverse-``M`` expansion (two-overlap regime)."""
    n = spec.n
    if n <= 1.0:
        raise DomainError("n > 1 required; use limit_n1 for n = 1")
    if spec.manifold is Manifold.TORUS_JOINT:
        s, r, d = _circle_large_M(spec.m_eff, n)
        return AsymptoticTriple(s, r, 2.0 * d, Validity.LARGE_M)
    M = spec.M
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        e = 2.0 * math.pi / M
        s = (n - 1) / (n + 1) * e + (n - 1) * (n * n - 6 * n + 1) / (3 * (n + 1) ** 3) * e**3
        q = (math.pi / M) ** 2
        r = 2 * n / (n + 1) + 8 * n * (n * n - 4 * n + 1) / (3 * (n + 1) ** 3) * q
        d = 4 / (n + 1) + 64 * n * n / (3 * (n + 1) ** 3) * q
        return AsymptoticTriple(s, r, d, Validity.LARGE_M)
    return AsymptoticTriple(*_circle_large_M(M, n), Validity.LARGE_M)


def limit_n1(spec: ProblemSpec) -> AsymptoticTriple:
    """Single firing event: a hard vector quantizer whose codewords are arc centroids."""
    r, d = n1_closed_form(spec)
    return AsymptoticTriple(0.0, r, d, Validity.N_EQUALS_ONE)


def s_near_n1(spec: ProblemSpec) -> float:
    """First-order growth of ``s`` just above one firing event."""
    m = spec.m_eff
    p = math.pi / m
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        return (spec.n - 1) / 2 * (m / math.pi) * math.sin(p) ** 2
    return (spec.n - 1) * (m / math.pi) * math.sin(p) ** 2


def expand_large_n(spec: ProblemSpec) -> AsymptoticTriple:
    """Cube-root expansion about the three-overlap limit ``s -> 2 pi / M_eff``."""
    n = spec.n
    if spec.manifold is Manifold.TORUS_JOINT:
        s, r, d = _circle_large_n(spec.m_eff, n)
        return AsymptoticTriple(s, r, 2.0 * d, Validity.LARGE_N)
    M = spec.M
    if spec.manifold is Manifold.TORUS_FACTORIAL:
        e = 2.0 * math.pi / M
        q = 12 * math.pi / (M * n * math.cos(e) ** 2)
        s = 4 * math.pi / M - q ** (1 / 3)
        r = (2 - q ** (2 / 3)) / math.cos(e)
        d = 4 / n * (2 / math.cos(e) ** 2 - 1)
        return AsymptoticTriple(s, r, d, Validity.LARGE_N)
    return AsymptoticTriple(*_circle_large_n(M, n), Validity.LARGE_N)


def linear_manifold_limit(n: float) -> tuple[float, float]:
    """``(s, D1 + D2)`` for a line with unit neuron spacing."""
    if n < 1.0:
        raise DomainError("n >= 1 required")
    return (n - 1) / (2 * n), (2 * n - 1) / (6 * n * n)


@dataclass(frozen=True)
class RegimeBoundary:
    """Firing-event count where the optimum ``s`` reaches half the neuron spacing."""

    m_eff: float
    manifold: Manifold
    n_exact: float
    n_asymptote: float


def boundary_two_three(m_eff: float, manifold: Manifold = Manifold.CIRCLE) -> RegimeBoundary:
    """Exact two/three-overlap boundary in ``n`` at a given per-circle neuron count.

    At ``s = pi/m`` the two-overlap equation is linear in ``(n-1)/n``, so the
    boundary has a closed form.  The factorial equation is the circle one with
    ``n -> (n+1)/2``.
    """
    manifold = Manifold(manifold)
    if m_eff < 4.0:
        raise DomainError("M_eff >= 4 required")
    p = math.pi / m_eff
    k = (m_eff / math.pi) * math.sin(p) * (math.cos(p) + p * math.sin(p))
    n_circle = 1.0 / (1.0 - 1.0 / k)
    if manifold is Manifold.TORUS_FACTORIAL:
        M = 2.0 * m_eff
        return RegimeBoundary(m_eff, manifold, 2.0 * n_circle - 1.0, 1.5 * M * M / math.pi**2)
    return RegimeBoundary(m_eff, manifold, n_circle, 3.0 * m_eff**2 / math.pi**2)


def crossing_residual(M: float) -> float:
    return math.tan(math.pi / math.sqrt(M)) ** 2 - (2.0 / math.cos(2.0 * math.pi / M) ** 2 - 1.0)


def asymptotic_crossing_M() -> float:
    """``M`` at which joint and factorial large-``n`` distortions coincide."""
    return brentq(crossing_residual, 4.0 + 1e-6, 100.0, xtol=1e-14, rtol=1e-15)

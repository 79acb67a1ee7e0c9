"""Joint versus factorial encoding of the 2-torus."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .codec import DomainError, Manifold, ProblemSpec
from .solver import solve

log = logging.getLogger(__name__)

M_MIN, M_MAX = 8.0, 64.0


class Winner(str, enum.Enum):
    JOINT = "joint"
    FACTORIAL = "factorial"


@dataclass(frozen=True)
class ComparisonRow:
    M: float
    n: float
    d_joint: float
    d_factorial: float
    winner: Winner
    rel_gap: float


def distortion_gap(M: float, n: float) -> float:
    """``D_factorial - D_joint``; negative where factorial coding wins."""
    d_j = solve(ProblemSpec(Manifold.TORUS_JOINT, M, n)).d_total
    d_f = solve(ProblemSpec(Manifold.TORUS_FACTORIAL, M, n)).d_total
    return d_f - d_j


def compare(M: float, n: float) -> ComparisonRow:
    """Both encoders at one ``(M, n)`` point; each picks its own regime."""
    if M < M_MIN:
        raise DomainError(f"M >= {M_MIN:g} required (factorial coding needs M/2 >= 4)")
    d_j = solve(ProblemSpec(Manifold.TORUS_JOINT, M, n)).d_total
    d_f = solve(ProblemSpec(Manifold.TORUS_FACTORIAL, M, n)).d_total
    winner = Winner.FACTORIAL if d_f < d_j else Winner.JOINT
    return ComparisonRow(float(M), float(n), d_j, d_f, winner, (d_f - d_j) / d_f)


def winner_boundary(n: float, lo: float = M_MIN, hi: float = M_MAX, xtol: float = 1e-6) -> float | None:
    """Neuron count where the favoured encoder switches, or ``None`` without a crossing."""
    g = lambda M: distortion_gap(M, n)
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if glo * ghi > 0.0:
        return None
    return bisect(g, lo, hi, xtol=xtol)


@dataclass
class SweepTable:
    """Rows of a sweep plus the neuron counts that were skipped."""

    rows: list[ComparisonRow] = field(default_factory=list)
    excluded_M: list[float] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]


def sweep(M_list, n_range: tuple[float, float], steps: int) -> SweepTable:
    """Rows on a geometric grid in ``n`` for each ``M``.

    Neuron counts below 8 give fewer than four neurons per circle for the
    factorial encoder and are skipped; they are listed in ``excluded_M``.
    """
    n_lo, n_hi = n_range
    if steps < 1 or n_lo < 1.0 or n_hi < n_lo:
        raise DomainError("need steps >= 1 and 1 <= n_lo <= n_hi")
    ns = np.geomspace(n_lo, n_hi, steps) if steps > 1 else np.array([n_lo])
    table = SweepTable()
    for M in M_list:
        if M < M_MIN:
            log.info("skipping M=%g: factorial coding needs M/2 >= 4", M)
            table.excluded_M.append(float(M))
            continue
        table.rows.extend(compare(M, float(n)) for n in ns)
    return table

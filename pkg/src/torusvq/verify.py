"""Grid-wide cross-checks of the analytic solutions against the oracle."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .codec import Manifold, ProblemSpec, Regime, build_profile, posterior_eval
from .oracle import (
    mc_estimate,
    numeric_minimize_s,
    quadrature_objective,
    stationarity_residual_P,
    stationarity_residual_X,
)
from .solver import optimal_r, solve

GRID_M_EFF = (4.0, 6.0, 8.0, 12.0, 16.0, 32.0)
GRID_N = (1.5, 2.0, 5.0, 20.0, 100.0, 1e4)
FAST_M_EFF = (4.0, 8.0, 32.0)
FAST_N = (1.5, 5.0, 100.0)
FAMILIES = ("closed_form", "stationarity_P", "stationarity_X", "local_minimum", "minimization", "monte_carlo")


@dataclass
class Check:
    id: str
    family: str
    passed: bool
    value: float
    limit: float


@dataclass
class Report:
    level: str
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.id for c in self.checks if not c.passed]

    def summary(self) -> dict:
        fam = {}
        for f in FAMILIES:
            cs = [c for c in self.checks if c.family == f]
            if cs:
                fam[f] = {"passed": all(c.passed for c in cs), "checks": len(cs)}
        return {
            "level": self.level,
            "seed": self.seed,
            "passed": self.passed,
            "families": fam,
            "failures": self.failures,
            "checks": [asdict(c) for c in self.checks],
        }


def grid_specs(m_effs=GRID_M_EFF, ns=GRID_N) -> list[ProblemSpec]:
    """Circle and factorial-torus problems over a grid of per-circle neuron counts."""
    out = []
    for kind in (Manifold.CIRCLE, Manifold.TORUS_FACTORIAL):
        for m in m_effs:
            M = m if kind is Manifold.CIRCLE else 2.0 * m
            out.extend(ProblemSpec(kind, M, n) for n in ns)
    return out


def tag(spec: ProblemSpec) -> str:
    return f"{spec.manifold.value}:M={spec.M:g}:n={spec.n:g}"


def perturbed_cost(spec: ProblemSpec, s: float, r: float | None = None) -> float:
    """Integrated ``D1 + D2`` at an arbitrary ``s``.

    ``r`` defaults to the closed-form optimum for that ``s``.
    """
    regime = Regime.TWO_OVERLAP if s <= 0.5 * spec.delta else Regime.THREE_OVERLAP
    prof = build_profile(spec, s, regime)
    if r is None:
        r = optimal_r(spec, s, regime)
    return quadrature_objective(prof, r, spec).d_total


def overlap_thetas(spec: ProblemSpec, s: float, regime: Regime, count: int, rng) -> np.ndarray:
    """Random angles where neuron 0 shares the input with at least one neighbour."""
    half = 0.5 * spec.delta
    lo = half - s if regime is Regime.TWO_OVERLAP else 0.0
    width = half + s - lo
    t = lo + width * (0.001 + 0.998 * rng.random(count))
    return t


def check_point(spec: ProblemSpec, rng, tol: float = 1e-8, stat_tol: float = 1e-9) -> list[Check]:
    sol = solve(spec)
    prof = build_profile(spec, sol.s, sol.regime)
    name = tag(spec)
    checks = []

    q = quadrature_objective(prof, sol.r, spec)
    rel = abs(q.d_total - sol.d_total) / sol.d_total
    checks.append(Check(f"closed_form[{name}]", "closed_form", rel <= tol, rel, tol))

    worst = 0.0
    for t in overlap_thetas(spec, sol.s, sol.regime, 50, rng):
        if posterior_eval(prof, t) > 0.0:
            worst = max(worst, abs(stationarity_residual_P(prof, sol.r, spec, float(t))))
    checks.append(Check(f"stationarity_P[{name}]", "stationarity_P", worst <= stat_tol, worst, stat_tol))

    xr = float(np.linalg.norm(stationarity_residual_X(sol)))
    checks.append(Check(f"stationarity_X[{name}]", "stationarity_X", xr <= stat_tol, xr, stat_tol))

    base = q.d_total
    # only s moves; r stays at the optimum
    rise = min(perturbed_cost(spec, sol.s + d, sol.r) - base for d in (-1e-3, 1e-3))
    checks.append(Check(f"local_minimum[{name}]", "local_minimum", rise >= 1e-9, rise, 1e-9))
    return checks


def check_minimization(spec: ProblemSpec, s_tol: float = 1e-6) -> Check:
    sol = solve(spec)
    s_num, _ = numeric_minimize_s(spec, sol.regime)
    err = abs(s_num - sol.s)
    return Check(f"minimization[{tag(spec)}]", "minimization", err <= s_tol, err, s_tol)


def mc_zscores(spec: ProblemSpec, seeds, samples: int) -> tuple[np.ndarray, list]:
    sol = solve(spec)
    prof = build_profile(spec, sol.s, sol.regime)
    ref = quadrature_objective(prof, sol.r, spec).d_total
    ests = [mc_estimate(prof, sol.r, spec, samples, seed) for seed in seeds]
    z = np.array([(e.d_total_hat - ref) / e.d_total_se for e in ests])
    return z, ests


def check_monte_carlo(seed: int, samples: int, count: int = 20) -> list[Check]:
    spec = ProblemSpec(Manifold.CIRCLE, 8, 2)
    seeds = [seed + i for i in range(count)]
    z, ests = mc_zscores(spec, seeds, samples)
    again = mc_estimate(
        build_profile(spec, solve(spec).s, solve(spec).regime), solve(spec).r, spec, samples, seeds[0]
    )
    same = again == ests[0]
    zmax = float(np.max(np.abs(z)))
    zmean = float(abs(np.mean(z)))
    return [
        Check("monte_carlo[max|z|]", "monte_carlo", zmax <= 5.0, zmax, 5.0),
        Check("monte_carlo[|mean z|]", "monte_carlo", zmean <= 0.5, zmean, 0.5),
        Check("monte_carlo[reproducible]", "monte_carlo", bool(same), float(same), 1.0),
    ]


def run(level: str = "fast", seed: int = 0, tol: float = 1e-8) -> Report:
    """Run every check family.  ``fast`` uses a reduced grid and fewer samples."""
    full = level == "full"
    specs = grid_specs() if full else grid_specs(FAST_M_EFF, FAST_N)
    report = Report(level, seed)
    for i, spec in enumerate(specs):
        rng = np.random.default_rng([seed, i])
        report.checks.extend(check_point(spec, rng, tol))
    minim = specs if full else specs[:: max(1, len(specs) // 4)]
    report.checks.extend(check_minimization(sp) for sp in minim)
    report.checks.extend(check_monte_carlo(seed, 1_000_000 if full else 100_000))
    return report

"""Population quantities for a single-covariate data generating process.

Computes the exact (asymptotic) treated-group effect, treatment prevalence,
and the two limiting variances of the weighted effect estimator: one treating
the weights as estimated and one treating them as known, together with the
constant that separates them. All expectations over the covariate go through
one functional, so two-point (Bernoulli) and Gauss-Hermite (Normal) evaluation
share the same code path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit

from .errors import QuadratureFailure, SingularA11


@dataclass(frozen=True)
class BernoulliL:
    pi: float

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise ValueError(f"Bernoulli probability must be in (0,1), got {self.pi}")


@dataclass(frozen=True)
class NormalL:
    """Normal covariate with the given mean and variance fixed at 1."""

    mean: float


@dataclass(frozen=True)
class DiscreteL:
    """Finite support distribution; used to cross-check the Bernoulli path."""

    points: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if len(self.points) != len(p) or abs(p.sum() - 1.0) > 1e-12 or (p < 0).any():
            raise ValueError("probs must be non-negative and sum to 1, one per point")


LDistribution = BernoulliL | NormalL | DiscreteL


@dataclass(frozen=True)
class ScenarioSpec:
    """Data generating process for one covariate, a binary exposure, and an outcome.

    The exposure follows logit P(A=1 | L=l) = a0 + a1*l with
    ``logit_coef = (a0, a1)``; the outcome mean is
    E(Y^a | L=l) = b_a*a + b_l*l + b_al*a*l with
    ``outcome_coef = (b_a, b_l, b_al)`` (no intercept), and the outcome is
    Normal around that mean with standard deviation ``outcome_sd``.
    """

    l_dist: LDistribution
    logit_coef: tuple[float, float]
    outcome_coef: tuple[float, float, float]
    outcome_sd: float

    def __post_init__(self):
        if not self.outcome_sd > 0:
            raise ValueError(f"outcome_sd must be > 0, got {self.outcome_sd}")

    def propensity(self, l):
        a0, a1 = self.logit_coef
        return expit(a0 + a1 * np.asarray(l, dtype=float))

    def odds(self, l):
        a0, a1 = self.logit_coef
        return np.exp(a0 + a1 * np.asarray(l, dtype=float))

    def outcome_mean(self, a, l):
        b_a, b_l, b_al = self.outcome_coef
        l = np.asarray(l, dtype=float)
        return b_a * a + b_l * l + b_al * a * l


#: Named presets for the four reference scenarios.
SCENARIOS: dict[str, ScenarioSpec] = {
    "i": ScenarioSpec(BernoulliL(0.5), (-1.0, -2.0), (-1.0, -1.5, 1.5), 0.5),
    "ii": ScenarioSpec(BernoulliL(0.3), (1.0, 0.1), (1.0, 1.5, 0.5), 0.5),
    "iii": ScenarioSpec(NormalL(0.0), (1.0, 0.1), (1.0, 0.5, -1.5), 0.5),
    "iv": ScenarioSpec(NormalL(1.0), (1.0, -1.0), (1.0, -1.5, -0.5), 0.5),
}


def expect(spec: ScenarioSpec, integrand: Callable[[np.ndarray], np.ndarray],
           nodes: int = 80) -> float:
    """E[integrand(L)] under spec.l_dist.

    Bernoulli and discrete supports are exact sums; Normal uses Gauss-Hermite
    quadrature with ``nodes`` nodes after the change of variables
    l = mean + sqrt(2) * x.
    """
    dist = spec.l_dist
    if isinstance(dist, BernoulliL):
        pts = np.array([0.0, 1.0])
        wts = np.array([1.0 - dist.pi, dist.pi])
    elif isinstance(dist, DiscreteL):
        pts = np.asarray(dist.points, dtype=float)
        wts = np.asarray(dist.probs, dtype=float)
    else:
        x, w = np.polynomial.hermite.hermgauss(nodes)
        pts = dist.mean + np.sqrt(2.0) * x
        wts = w / np.sqrt(np.pi)
    return float(np.sum(wts * np.asarray(integrand(pts), dtype=float)))


@dataclass(frozen=True)
class PopulationMoments:
    p1: float
    mu1: float
    mu0: float
    att: float


@dataclass(frozen=True)
class AsymptoticResult:
    att: float
    p1: float
    sigma: float
    sigma_star: float
    constant: float
    sd_ratio: float


def population_moments(spec: ScenarioSpec, nodes: int = 80) -> PopulationMoments:
    """Treatment prevalence and treated-group potential outcome means.

    p1 = E[e(L)]; mu_a = E[E(Y^a | L) e(L)] / p1; the effect is mu1 - mu0.
    """
    e = spec.propensity
    p1 = expect(spec, e, nodes)
    mu1 = expect(spec, lambda l: spec.outcome_mean(1, l) * e(l), nodes) / p1
    mu0 = expect(spec, lambda l: spec.outcome_mean(0, l) * e(l), nodes) / p1
    return PopulationMoments(p1=p1, mu1=mu1, mu0=mu0, att=mu1 - mu0)


def _variance_pieces(spec: ScenarioSpec, nodes: int):
    """All population moments needed for the two variances, at a node count."""
    mom = population_moments(spec, nodes)
    p1, mu1, mu0 = mom.p1, mom.mu1, mom.mu0
    e, h = spec.propensity, spec.odds
    basis = (lambda l: np.ones_like(l), lambda l: l)

    def ev(f):
        return expect(spec, f, nodes)

    a11 = np.array(
        [[ev(lambda l, xi=xi, xj=xj: e(l) * (1 - e(l)) * xi(l) * xj(l)) for xj in basis]
         for xi in basis]
    )
    rcond = 1.0 / np.linalg.cond(a11)
    if not np.isfinite(rcond) or rcond < 1e-12:
        raise SingularA11(f"score information block has reciprocal condition {rcond:.2e}")
    # Treated / control mean-residual moments against the design basis.
    g1 = np.array([ev(lambda l, x=x: (spec.outcome_mean(1, l) - mu1) * e(l) * (1 - e(l)) * x(l))
                   for x in basis])
    g0 = np.array([ev(lambda l, x=x: (spec.outcome_mean(0, l) - mu0) * e(l) * (1 - e(l)) * x(l))
                   for x in basis])
    g0h = np.array([ev(lambda l, x=x: (spec.outcome_mean(0, l) - mu0) * e(l) ** 2 * x(l))
                    for x in basis])
    q0 = g0 + g0h  # equals E[(E(Y^0|L) - mu0) e(L) X(L)]

    solve = np.linalg.solve
    c12 = float(g1 @ solve(a11, q0))
    c22 = float(g0 @ solve(a11, g0) - g0h @ solve(a11, g0h))
    c = np.array([[0.0, c12], [c12, c22]])
    constant = (c[0, 0] + c[1, 1] - 2 * c[0, 1]) / p1**2

    sd2 = spec.outcome_sd**2
    b22_treated = ev(lambda l: e(l) * (sd2 + (spec.outcome_mean(1, l) - mu1) ** 2))
    b22_control = ev(lambda l: h(l) * e(l) * (sd2 + (spec.outcome_mean(0, l) - mu0) ** 2))
    sigma_star = (b22_treated + b22_control) / p1**2
    sigma = sigma_star + constant
    return mom, a11, g1, g0, g0h, c, sigma_star, sigma, constant


def asymptotic_variance(spec: ScenarioSpec, nodes: int = 80,
                        doubling_rtol: float = 1e-8) -> AsymptoticResult:
    """Limiting variances of the effect estimator with estimated vs known weights.

    For a Normal covariate the result must be stable under node doubling
    (relative change below ``doubling_rtol`` for both variances), otherwise
    QuadratureFailure is raised. The doubled-node values are returned.
    """
    mom, *_, sigma_star, sigma, constant = _variance_pieces(spec, nodes)
    if isinstance(spec.l_dist, NormalL):
        mom2, *_, sigma_star2, sigma2, constant2 = _variance_pieces(spec, 2 * nodes)
        drift = max(
            abs(sigma2 - sigma) / max(abs(sigma2), 1e-300),
            abs(sigma_star2 - sigma_star) / max(abs(sigma_star2), 1e-300),
        )
        if drift > doubling_rtol:
            raise QuadratureFailure(
                f"node doubling moved the variances by {drift:.2e} "
                f"(> {doubling_rtol:.0e}) at {nodes} nodes"
            )
        mom, sigma, sigma_star, constant = mom2, sigma2, sigma_star2, constant2
    return AsymptoticResult(
        att=mom.att,
        p1=mom.p1,
        sigma=sigma,
        sigma_star=sigma_star,
        constant=constant,
        sd_ratio=float(np.sqrt(sigma / sigma_star)),
    )


def population_blocks(spec: ScenarioSpec, nodes: int = 80):
    """Fully assembled population bread/meat for the stacked system (J = 1).

    Returns (A, B, grad_g) with parameter order (a0, a1, mu1, mu0). Used as an
    independent route to the estimated-weights variance: grad_g' A^-1 B A^-T grad_g
    must match ``asymptotic_variance(...).sigma``.
    """
    mom, a11, g1, g0, g0h, _, _, _, _ = _variance_pieces(spec, nodes)
    p1, mu1, mu0 = mom.p1, mom.mu1, mom.mu0
    e, h = spec.propensity, spec.odds
    basis = (lambda l: np.ones_like(l), lambda l: l)

    def ev(f):
        return expect(spec, f, nodes)

    q0 = g0 + g0h
    bread = np.zeros((4, 4))
    bread[:2, :2] = a11
    bread[3, :2] = -q0  # control mean equation reacts to the fitted odds
    bread[2, 2] = p1
    bread[3, 3] = p1

    sd2 = spec.outcome_sd**2
    meat = np.zeros((4, 4))
    meat[:2, :2] = a11  # information equality holds at the population level
    meat[2, :2] = g1
    meat[3, :2] = -g0h
    meat[:2, 2] = g1
    meat[:2, 3] = -g0h
    meat[2, 2] = ev(lambda l: e(l) * (sd2 + (spec.outcome_mean(1, l) - mu1) ** 2))
    meat[3, 3] = ev(lambda l: h(l) * e(l) * (sd2 + (spec.outcome_mean(0, l) - mu0) ** 2))
    grad_g = np.array([0.0, 0.0, 1.0, -1.0])
    return bread, meat, grad_g


def _dist_to_dict(dist: LDistribution) -> dict:
    if isinstance(dist, BernoulliL):
        return {"kind": "bernoulli", "pi": dist.pi}
    if isinstance(dist, NormalL):
        return {"kind": "normal", "mean": dist.mean}
    return {"kind": "discrete", "points": list(dist.points), "probs": list(dist.probs)}


def _dist_from_dict(d: dict) -> LDistribution:
    kind = d.get("kind")
    if kind == "bernoulli":
        return BernoulliL(float(d["pi"]))
    if kind == "normal":
        return NormalL(float(d["mean"]))
    if kind == "discrete":
        return DiscreteL(tuple(map(float, d["points"])), tuple(map(float, d["probs"])))
    raise ValueError(f"unknown covariate distribution kind {kind!r}")


def spec_to_json(spec: ScenarioSpec) -> str:
    return json.dumps(
        {
            "l_dist": _dist_to_dict(spec.l_dist),
            "logit_coef": list(spec.logit_coef),
            "outcome_coef": list(spec.outcome_coef),
            "outcome_sd": spec.outcome_sd,
        },
        indent=2,
    )


def spec_from_json(text: str) -> ScenarioSpec:
    d = json.loads(text)
    return ScenarioSpec(
        l_dist=_dist_from_dict(d["l_dist"]),
        logit_coef=tuple(map(float, d["logit_coef"])),
        outcome_coef=tuple(map(float, d["outcome_coef"])),
        outcome_sd=float(d["outcome_sd"]),
    )

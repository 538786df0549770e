"""Logistic propensity model MLE and treated-reference (odds) weights.

The model is logit P(A=1 | L) = alpha_0 + alpha_1' L, fit by Newton-Raphson
with step-halving. Treated units get weight 1; control units get the fitted
odds exp(alpha_0 + alpha_1' L), so the weighted control group stands in for
the treated population.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .dataset import Dataset
from .errors import (
    DataError,
    NonConvergence,
    RankDeficient,
    Separation,
    WeightOverflow,
)

SCORE_TOL = 1e-10          # sup-norm of the mean score at convergence
MAX_ITERATIONS = 25
MAX_HALVINGS = 20
SEPARATION_BOUND = 30.0    # |linear predictor| beyond this without convergence
RCOND_MIN = 1e-12          # reciprocal condition floor for the Newton system
LINPRED_OVERFLOW = 700.0   # exp() overflows past this


@dataclass(frozen=True)
class PropensityFit:
    """MLE coefficients with fitted propensities, odds, and unit weights.

    ``alpha`` is (J+1,) with the intercept first. ``weights`` is 1 exactly for
    treated units and equals ``odds`` for controls. ``score_norm`` is the
    sup-norm of the mean score at the returned coefficients.
    """

    alpha: np.ndarray
    propensities: np.ndarray
    odds: np.ndarray
    weights: np.ndarray
    iterations: int
    score_norm: float


def _mean_loglik(eta, a):
    # mean of A*eta - log(1 + exp(eta)), stable for large |eta|
    return float(np.mean(a * eta - np.logaddexp(0.0, eta)))


def fit_logistic(data: Dataset, tol: float = SCORE_TOL,
                 max_iterations: int = MAX_ITERATIONS) -> PropensityFit:
    """Maximum likelihood fit of the logistic treatment model.

    Newton-Raphson from alpha = 0 with up to 20 step-halvings per iteration
    whenever the log-likelihood would decrease. Convergence requires the mean
    score sup-norm <= ``tol``.

    Raises
    ------
    RankDeficient
        Newton system has reciprocal condition below 1e-12 (collinear design).
    Separation
        Some |linear predictor| exceeds 30 before the score converges.
    NonConvergence
        Iteration limit reached.
    """
    x = data.design_matrix()
    a = data.treatment
    n = data.n
    alpha = np.zeros(x.shape[1])
    eta = x @ alpha
    e = expit(eta)
    loglik = _mean_loglik(eta, a)
    iterations = 0

    while True:
        score = x.T @ (a - e) / n
        score_norm = float(np.max(np.abs(score)))
        if score_norm <= tol:
            break
        if np.max(np.abs(eta)) > SEPARATION_BOUND:
            raise Separation(
                f"|linear predictor| exceeded {SEPARATION_BOUND} with mean score "
                f"sup-norm {score_norm:.2e} still above tolerance"
            )
        if iterations >= max_iterations:
            raise NonConvergence(
                f"score sup-norm {score_norm:.2e} after {iterations} iterations"
            )
        info = x.T @ (x * (e * (1.0 - e))[:, None]) / n
        rcond = 1.0 / np.linalg.cond(info)
        if not np.isfinite(rcond) or rcond < RCOND_MIN:
            raise RankDeficient(
                f"Newton system reciprocal condition {rcond:.2e} < {RCOND_MIN:.0e}"
            )
        step = np.linalg.solve(info, score)
        # Step-halving: shrink until the likelihood stops decreasing.
        scale = 1.0
        for _ in range(MAX_HALVINGS):
            trial = alpha + scale * step
            trial_eta = x @ trial
            trial_loglik = _mean_loglik(trial_eta, a)
            if trial_loglik >= loglik:
                break
            scale *= 0.5
        alpha = alpha + scale * step
        eta = x @ alpha
        e = expit(eta)
        loglik = _mean_loglik(eta, a)
        iterations += 1

    odds = np.exp(eta)
    weights = np.where(a == 1.0, 1.0, odds)
    return PropensityFit(
        alpha=alpha,
        propensities=e,
        odds=odds,
        weights=weights,
        iterations=iterations,
        score_norm=float(np.max(np.abs(x.T @ (a - e) / n))),
    )


def compute_weights(alpha: np.ndarray, data: Dataset) -> np.ndarray:
    """Unit weights A + (1 - A) * exp(alpha_0 + alpha_1' L) for given coefficients."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.shape[0] != data.n_covariates + 1:
        raise DataError(
            f"alpha has length {alpha.shape[0]}, expected {data.n_covariates + 1}"
        )
    if not np.isfinite(alpha).all():
        raise DataError("alpha contains non-finite values")
    eta = data.design_matrix() @ alpha
    if np.max(eta) > LINPRED_OVERFLOW:
        raise WeightOverflow(
            f"linear predictor {np.max(eta):.3g} exceeds {LINPRED_OVERFLOW:g}"
        )
    return np.where(data.treatment == 1.0, 1.0, np.exp(eta))


def weight_diagnostic(weights: np.ndarray, treatment: np.ndarray) -> dict[str, float]:
    """Mean weight vs. its expected value 2 * (treated fraction).

    Purely descriptive; callers compare the two values themselves.
    """
    w = np.asarray(weights, dtype=float).ravel()
    a = np.asarray(treatment, dtype=float).ravel()
    if w.shape[0] != a.shape[0]:
        raise DataError(f"length mismatch: {w.shape[0]} weights, {a.shape[0]} treatments")
    return {
        "mean_weight": float(np.mean(w)),
        "expected_mean": float(2.0 * np.mean(a)),
    }

"""In-memory dataset container: covariates, binary treatment, one or more outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NonFiniteOutcome


@dataclass(frozen=True)
class Dataset:
    """n units with a J-column covariate matrix, 0/1 treatment, and G outcome columns.

    ``covariates`` is (n, J), ``treatment`` is (n,) with entries in {0, 1}, and
    ``outcomes`` is (n, G); a 1-D outcome vector is accepted and reshaped to
    (n, 1). Validation requires n >= J + 2, both treatment arms non-empty, and
    all entries finite.
    """

    covariates: np.ndarray
    treatment: np.ndarray
    outcomes: np.ndarray
    outcome_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.covariates, dtype=float))
        trt = np.asarray(self.treatment, dtype=float).ravel()
        out = np.asarray(self.outcomes, dtype=float)
        if out.ndim == 1:
            out = out[:, None]
        if out.ndim != 2:
            raise DataError(f"outcomes must be 1-D or 2-D, got ndim={out.ndim}")
        n = cov.shape[0]
        if trt.shape[0] != n or out.shape[0] != n:
            raise DataError(
                f"row mismatch: covariates {n}, treatment {trt.shape[0]}, outcomes {out.shape[0]}"
            )
        if n < cov.shape[1] + 2:
            raise DataError(f"need n >= J + 2, got n={n}, J={cov.shape[1]}")
        if out.shape[1] < 1:
            raise DataError("need at least one outcome column")
        if not np.isfinite(cov).all():
            raise DataError("covariates contain non-finite values")
        if not np.isfinite(out).all():
            raise NonFiniteOutcome("outcomes contain non-finite values")
        if not np.isfinite(trt).all() or not np.isin(trt, (0.0, 1.0)).all():
            raise DataError("treatment entries must all be 0 or 1")
        if trt.sum() < 1 or (1 - trt).sum() < 1:
            raise DataError("both treatment arms must be non-empty")
        names = tuple(self.outcome_names) or tuple(f"y{g}" for g in range(out.shape[1]))
        if len(names) != out.shape[1]:
            raise DataError(
                f"{len(names)} outcome names for {out.shape[1]} outcome columns"
            )
        object.__setattr__(self, "covariates", cov)
        object.__setattr__(self, "treatment", trt)
        object.__setattr__(self, "outcomes", out)
        object.__setattr__(self, "outcome_names", names)

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.outcomes.shape[1]

    def design_matrix(self) -> np.ndarray:
        """Covariates with a leading intercept column, shape (n, J + 1)."""
        return np.column_stack([np.ones(self.n), self.covariates])

    def outcome(self, index: int) -> np.ndarray:
        if not 0 <= index < self.n_outcomes:
            raise DataError(f"outcome index {index} out of range [0, {self.n_outcomes})")
        return self.outcomes[:, index]

"""Exception types shared across the toolkit."""


class IpwattError(Exception):
    """Base class for all toolkit errors."""


class DataError(IpwattError):
    """Invalid dataset contents (shape, non-finite values, bad treatment coding)."""


class ParseError(DataError):
    """CSV could not be parsed; carries row/column context when known."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class MissingColumn(DataError):
    """A requested column is absent from the input."""


class RankDeficient(IpwattError):
    """Design matrix is (numerically) collinear."""


class Separation(IpwattError):
    """Logistic MLE diverging: unbounded linear predictors before convergence."""


class NonConvergence(IpwattError):
    """Iteration limit reached without meeting the score tolerance."""


class WeightOverflow(IpwattError):
    """A linear predictor is too large to exponentiate safely."""


class EmptyGroup(IpwattError):
    """A treatment arm has no mass (zero weighted count)."""


class NonFiniteOutcome(IpwattError):
    """Outcome column contains NaN or infinity."""


class SingularBread(IpwattError):
    """Sandwich bread matrix is not invertible at tolerance."""


class SingularA11(IpwattError):
    """Population score-information block is not invertible."""


class QuadratureFailure(IpwattError):
    """Quadrature did not reach the requested accuracy under node doubling."""


class DegenerateDraws(IpwattError):
    """Data generation repeatedly produced single-group treatment vectors."""


class ReplicateFailure(IpwattError):
    """A Monte Carlo replicate failed; carries the replicate index."""

    def __init__(self, replicate, message):
        self.replicate = replicate
        super().__init__(f"replicate {replicate}: {message}")

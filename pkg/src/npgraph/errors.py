"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and an ``exit_status``
used by the command-line front end (2 input, 3 numerical, 4 invariant).
"""


class NpgraphError(Exception):
    code = "error"
    exit_status = 4


class InputError(NpgraphError, ValueError):
    code = "input_error"
    exit_status = 2


class NumericalError(NpgraphError, ArithmeticError):
    code = "numerical_error"
    exit_status = 3


class InvariantViolation(NpgraphError, AssertionError):
    code = "invariant_violation"
    exit_status = 4


class DomainError(InputError):
    code = "domain_error"


class ConstantColumn(InputError):
    code = "constant_column"

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"column {column} is constant")


class TooFewRows(InputError):
    code = "too_few_rows"


class DimensionMismatch(InputError):
    code = "dimension_mismatch"


class BadBandwidth(InputError):
    code = "bad_bandwidth"


class LengthMismatch(InputError):
    code = "length_mismatch"


class GridMismatch(InputError):
    code = "grid_mismatch"


class EmptyStageList(InputError):
    code = "empty_stage_list"


class NonSymmetricWeights(InputError):
    code = "non_symmetric_weights"


class VertexMismatch(InputError):
    code = "vertex_mismatch"


class EmptyPath(InputError):
    code = "empty_path"


class TooManyEdges(InputError):
    code = "too_many_edges"


class ParseError(InputError):
    code = "parse_error"

    def __init__(self, message, row=None, col=None):
        self.row = row
        self.col = col
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {col})" if col is not None else ")")
        super().__init__(message + where)


class DuplicateColumn(ParseError):
    code = "duplicate_column"


class NonNumericCell(ParseError):
    code = "non_numeric_cell"


class NonPositivePrice(InputError):
    code = "non_positive_price"

    def __init__(self, row, col):
        self.row = row
        self.col = col
        super().__init__(f"non-positive price at data row {row}, column {col} (1-based)")


class NotPositiveDefinite(NumericalError):
    code = "not_positive_definite"


class NotConverged(NumericalError):
    """Raised when an iterative solver exhausts its iteration budget.

    The last iterate is attached as ``estimate`` so callers can inspect it,
    but it is never returned as if it were a solution.
    """

    code = "not_converged"

    def __init__(self, iterations, residual, estimate=None, lam=None):
        self.iterations = iterations
        self.residual = residual
        self.estimate = estimate
        self.lam = lam
        msg = f"no convergence after {iterations} iterations (residual {residual:.3e})"
        if lam is not None:
            msg += f" at lambda={lam!r}"
        super().__init__(msg)


class SingularJacobian(NumericalError):
    code = "singular_jacobian"

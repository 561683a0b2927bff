"""Exception hierarchy shared by the solvers and the command line."""


class MatSolveError(Exception):
    """Base class for every error raised by matsolve."""

    exit_code = 1


class DimensionMismatch(MatSolveError, ValueError):
    pass


class SingularMatrix(MatSolveError, ArithmeticError):
    pass


class ZeroPolynomial(MatSolveError, ValueError):
    pass


class ParseError(MatSolveError, ValueError):
    exit_code = 2


class NotGeneric(MatSolveError):
    """The input hits a degenerate case the generic solver refuses to handle.

    ``check`` names the test that failed so callers can tell a repeated
    root from a rank-deficient kernel or an ill-conditioned eigenbasis.
    """

    exit_code = 3

    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class SingularA(NotGeneric):
    def __init__(self, message="quadratic coefficient A is singular"):
        super().__init__(message, check="singular_a")


class DefectiveM(NotGeneric):
    def __init__(self, message="pseudo-Hamiltonian matrix has repeated eigenvalues"):
        super().__init__(message, check="defective_m")


class NotGenericCommuting(NotGeneric):
    pass


class BudgetExceeded(MatSolveError):
    exit_code = 4


class NoConvergence(MatSolveError):
    exit_code = 5

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class CapExceeded(MatSolveError):
    pass


class DegreeCapExceeded(MatSolveError, ValueError):
    pass


class PositiveDimensional(MatSolveError):
    def __init__(self, message, hilbert_dimension):
        super().__init__(message)
        self.hilbert_dimension = hilbert_dimension


class IncompleteSolutionSet(MatSolveError, ValueError):
    pass

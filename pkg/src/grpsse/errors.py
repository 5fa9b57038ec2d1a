"""Exception hierarchy for the solver."""


class SolverError(RuntimeError):
    """Base class for failures raised while advancing a solution."""


class DomainError(ValueError):
    """An evaluator was called outside its domain of definition."""


class UnphysicalStateError(SolverError):
    """A conservative state has no admissible primitive preimage."""

    def __init__(self, message, index=None, time=None):
        self.index = index
        self.time = time
        where = []
        if index is not None:
            where.append(f"index {index}")
        if time is not None:
            where.append(f"t={time:.12g}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class HorizonError(SolverError):
    """The metric function A left (0, 1] or B became non-positive."""

    def __init__(self, message, index=None, time=None):
        self.index = index
        self.time = time
        if index is not None:
            message = f"{message} (interface {index})"
        super().__init__(message)


class RiemannError(SolverError):
    """The star-state root find failed to bracket a solution."""


class GrpError(SolverError):
    """A generalized Riemann problem branch was called outside its hypotheses."""

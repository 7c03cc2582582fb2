class PreconditionError(ValueError):
    """An input does not meet the requirements of a theorem harness."""


class NonUniformConvergence(PreconditionError):
    """Distances from f_t to the limit do not shrink on the corpus points."""


class ExtractionFailure(RuntimeError):
    """Nested-ball subsequence extraction ran out of points."""

    def __init__(self, message: str, stage: int, best_count: int):
        super().__init__(message)
        self.stage = stage
        self.best_count = best_count

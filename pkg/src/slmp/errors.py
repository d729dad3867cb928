"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: bad shapes, labels, parameters or files."""


class TrainingError(RuntimeError):
    """A training run could not finish.

    ``trace`` holds the objective values recorded before the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])

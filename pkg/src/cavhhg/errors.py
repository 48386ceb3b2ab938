"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration; carries the full list of problems found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DataFormatError(ValueError):
    """Malformed data file (electronic data, trajectory, checkpoint...)."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to converge; carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PropagationError(RuntimeError):
    """Numerical failure (NaN/Inf) during time propagation."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

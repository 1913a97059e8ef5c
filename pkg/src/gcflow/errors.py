"""Exception types shared across the package."""


class ConvexityLost(RuntimeError):
    """Raised when a body stops being uniformly convex (or star-shaped).

    Carries the offending node index and value so that callers (notably the
    time stepper, which uses this signal for step rejection) can report
    where the degeneration happened.
    """

    def __init__(self, message: str, node: int | None = None, value: float | None = None):
        if node is not None:
            message = f"{message} (worst node {node}, value {value:.6g})"
        super().__init__(message)
        self.node = node
        self.value = value


class StepCollapse(RuntimeError):
    """Raised after repeated time-step rejections; signals genuine degeneration."""


class ConfigError(ValueError):
    """Scenario-config parse error; ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

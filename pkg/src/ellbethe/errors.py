"""Exception types raised across the package."""


class PoleError(ValueError):
    """A theta-function denominator is too close to zero."""

    def __init__(self, what, value, tol):
        self.what = what
        self.value = value
        self.tol = tol
        super().__init__(f"pole proximity: |{what}| = {abs(value):.3e} < {tol:.1e}")


class DegenerateRootsError(ValueError):
    """Two Bethe roots coincide modulo the period lattice."""


class ConvergenceError(RuntimeError):
    """Newton iteration or continuation failed; ``trace`` holds the history."""

    def __init__(self, msg, trace=None, last=None):
        super().__init__(msg)
        self.trace = trace or []
        self.last = last


class AdjacencyError(ValueError):
    """Heights violate the nearest-neighbour rule a - b in {1, -1}."""

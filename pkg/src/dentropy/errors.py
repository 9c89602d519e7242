"""Exception types shared by both kernel backends and the CLI."""


class EigenConvergenceError(RuntimeError):
    """Implicit-shift QL iteration exceeded its cap for some eigenvalue."""

    def __init__(self, dim, max_iter):
        self.dim = dim
        self.max_iter = max_iter
        super().__init__(
            f"eigensolver failed to converge for a {dim}x{dim} matrix "
            f"(iteration cap {max_iter} reached)"
        )


class ConfigError(ValueError):
    """Aggregated experiment-config validation failure."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(f"invalid experiment config:\n{lines}")

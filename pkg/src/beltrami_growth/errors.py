"""Exception types shared across the package."""


class EvaluationError(ArithmeticError):
    """A function produced a non-finite value at a quadrature or sampling node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DegeneratePointError(ValueError):
    """|mu(z)| >= 1 at an evaluated point."""

    def __init__(self, z, modulus):
        super().__init__(f"degenerate Beltrami coefficient at z={z!r}: |mu|={modulus!r} >= 1")
        self.z = z
        self.modulus = modulus


class DegenerateProfileError(ValueError):
    """r*rho'(r) + rho(r) vanishes, so mu is undefined."""


class BreakpointError(ValueError):
    """A finite-difference stencil straddles a non-smooth radius of a profile."""


class CapacityError(RuntimeError):
    """The Dirichlet solver did not reach its residual tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InequalityViolation(AssertionError):
    """A numerically checked inequality failed; ``label`` names it, e.g. ``growth-bound``."""

    def __init__(self, label, detail):
        super().__init__(f"{label}: {detail}")
        self.label = label
        self.detail = detail

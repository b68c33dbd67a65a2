"""Exception and warning types shared across the package."""


class BvpError(Exception):
    """Base class for all package errors."""


class ShapeMismatchError(BvpError):
    """Operands live on different grids or have incompatible shapes."""


class GridTooCoarseError(BvpError):
    """Requested stencil does not fit on the grid ("grid-too-coarse")."""


class IntegrationBlowupError(BvpError):
    """Integration produced a non-finite state ("integration-blowup")."""

    def __init__(self, node: int):
        self.node = node
        super().__init__(f"integration-blowup: non-finite state at node {node}")


class ParseError(BvpError):
    """Expression syntax error; ``offset`` is the byte offset in the source."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


class EvalError(BvpError):
    """Runtime domain error while evaluating an expression."""


class NonFiniteSampleError(BvpError):
    """Expression produced a non-finite value at a grid node."""

    def __init__(self, node: int, t: float):
        self.node = node
        self.t = t
        super().__init__(f"non-finite-sample: node {node} (t={t!r})")


class BoundaryOrderError(BvpError):
    """Derivative order referenced by a boundary term is out of range."""


class BoundaryPointError(BvpError):
    """Boundary term references a point outside [a, b]."""


class SingularLimitError(BvpError):
    """The limit problem of a family is singular ("condition-0-fails")."""


class UnsolvableProblemError(BvpError):
    """Boundary data is incompatible with a rank-deficient problem."""

    def __init__(self, kernel_dim: int, residual: float):
        self.kernel_dim = kernel_dim
        self.residual = residual
        super().__init__(
            f"incompatible boundary data: kernel dimension {kernel_dim}, "
            f"residual {residual:.3e}"
        )


class ScenarioError(BvpError):
    """Scenario file violates the schema; carries the offending field."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class NearSingularWarning(UserWarning):
    """Fundamental matrix determinant nearly vanishes ("near-singular-X")."""


class IllConditionedWarning(UserWarning):
    """Characteristic matrix is numerically ill-conditioned."""

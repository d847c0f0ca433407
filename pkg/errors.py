"""
Exception Hierarchy
Errors raised by the mutation toolkit, grouped so the CLI can map them to exit codes
"""


class MutationToolkitError(Exception):
    """Base class for every error raised by this package"""


class StructuralError(MutationToolkitError, ValueError):
    """Malformed input: mismatched variables, dangling references, open paths, bad types"""


class NumericError(MutationToolkitError, ArithmeticError):
    """Base class for errors caused by where a numeric evaluation happens"""


class DomainError(NumericError):
    """Point outside the domain (zero holonomy coordinate, point outside a half-plane)"""


class WallError(NumericError):
    """Denominator vanishes at the evaluation point (the wall 1 + z_1 + ... + z_{n-1} = 0)"""


class SingularityError(NumericError):
    """Path passes too close to the origin (or to the winding centre)"""


class BranchError(NumericError):
    """n-th root evaluated on its branch cut"""


class InconsistencyError(NumericError):
    """Coboundary does not square to zero at the evaluation point"""


class GenerationError(MutationToolkitError, RuntimeError):
    """Fixture generation gave up after its retry budget"""


class ResourceError(MutationToolkitError, RuntimeError):
    """Enumeration would exceed the configured size guard"""

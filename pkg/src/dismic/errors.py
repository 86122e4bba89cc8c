"""Exception hierarchy shared by every stage of the pipeline.

Two failure classes matter to callers: bad input data and numerical
breakdown. The command line maps them to exit codes 1 and 2. Both also
inherit a matching builtin so generic callers (e.g. sklearn-style code
that expects ValueError on malformed arrays) keep working.
"""


class DismicError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DismicError, ValueError):
    """Invalid input: malformed files, broken invariants, bad configuration."""


class NumericalError(DismicError, ArithmeticError):
    """Numerical failure: singular system, divergent series, zero normalizer."""

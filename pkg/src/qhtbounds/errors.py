"""Exception hierarchy shared across the package.

``DomainError`` covers violated mathematical preconditions, ``ResourceError``
covers the explicit size guards, and both stay distinguishable from plain
parsing problems so the CLI can map them to stable exit codes.
"""


class QhtError(Exception):
    """Base class for all package errors."""


class DomainError(QhtError, ValueError):
    """A mathematical precondition was violated."""


class InvalidStateError(DomainError):
    """Input does not describe a valid density matrix."""


class SupportError(DomainError):
    """Support condition between two operators is violated."""


class AdmissibilityError(DomainError):
    """Parameters fall outside the validity window of a bound."""


class CertificationError(DomainError):
    """A factorization constant is missing, unsound or not certifiable."""


class ConvergenceError(QhtError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class ResourceError(QhtError, RuntimeError):
    """A computation was refused by an explicit size guard."""

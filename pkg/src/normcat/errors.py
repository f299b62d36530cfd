"""Exception hierarchy shared by every module.

The CLI maps :class:`InputError` to exit code 2 and :class:`Refutation`
to exit code 1; everything else is a bug.
"""


class NormcatError(Exception):
    """Base class for all library errors."""


class InputError(NormcatError, ValueError):
    """Malformed or precondition-violating input."""

    def __init__(self, message, *, tag=None, pointer=None, witness=None, report=None):
        super().__init__(message)
        self.tag = tag
        self.pointer = pointer
        self.witness = witness
        self.report = report


class NotSubcategoryError(InputError):
    def __init__(self, message, *, witness=None):
        super().__init__(message, tag="NOT-SUBCATEGORY", witness=witness)


class CompositionError(NormcatError):
    """Composition requested for a non-composable pair.

    This is a logic error on the caller's side and is never swallowed by
    the auditors.
    """


class UndefinedComposite(NormcatError):
    """A composable pair whose composite lies outside a truncated window."""


class UndecidableError(NormcatError):
    """The question cannot be settled within the enumeration budget."""


class Refutation(NormcatError):
    """Finite evidence contradicts a supplied certificate or modulus."""

    def __init__(self, message, *, witness=None):
        super().__init__(message)
        self.witness = witness or {}

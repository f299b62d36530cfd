"""Normed categories: axiom audits, quasi-metrics, Cauchy sequences and
certified fixed points of contraction functors."""
from .core import (
    DEFAULT_BUDGET, DEFAULT_TOL, AuditReport, IsoCheck, NormedCategory, Status, audit_norm,
    audit_quasimetric, check_kernel_axioms, check_pair, induced_quasimetric, is_zero_isomorphism,
    kernel,
)
from .errors import (
    CompositionError, InputError, NormcatError, NotSubcategoryError, Refutation, UndecidableError,
    UndefinedComposite,
)
from .extreal import INF

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BUDGET", "DEFAULT_TOL", "INF", "AuditReport", "IsoCheck", "NormedCategory", "Status",
    "audit_norm", "audit_quasimetric", "check_kernel_axioms", "check_pair", "induced_quasimetric",
    "is_zero_isomorphism", "kernel", "CompositionError", "InputError", "NormcatError",
    "NotSubcategoryError", "Refutation", "UndecidableError", "UndefinedComposite",
]

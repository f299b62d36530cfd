"""Arithmetic on the extended half-line [0, +inf].

Values are plain Python floats; ``INF`` is ``math.inf``.  IEEE addition
already saturates (``x + inf == inf``), so only validation, tolerant
comparison and the subtraction used for report deltas need helpers.
"""
from __future__ import annotations

import math

INF = math.inf


def ext(value) -> float:
    """Coerce ``value`` to an extended non-negative real.

    Accepts numbers and the strings ``"inf"``/``"INF"``/``"+inf"``.
    """
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return INF
        raise ValueError(f"not an extended non-negative real: {value!r}")
    if isinstance(value, bool):
        raise ValueError(f"not an extended non-negative real: {value!r}")
    x = float(value)
    if math.isnan(x) or x < 0:
        raise ValueError(f"not an extended non-negative real: {value!r}")
    return x


def is_finite(x: float) -> bool:
    return x != INF


def leq(a: float, b: float, tol: float = 0.0) -> bool:
    """``a <= b`` up to additive slack ``tol``, with INF on either side."""
    if b == INF:
        return True
    if a == INF:
        return False
    return a <= b + tol


def sat_sub(a: float, b: float) -> tuple[float, bool]:
    """Saturating ``a - b`` for report deltas.

    Returns ``(value, flagged)``; ``INF - INF`` is reported as ``INF`` with
    the flag set.  Never used inside an axiom check.
    """
    if a == INF and b == INF:
        return INF, True
    if a == INF:
        return INF, False
    if b == INF:
        return -INF, False
    return a - b, False


def to_json(x: float):
    """JSON-safe form: finite floats stay numbers, INF becomes ``"inf"``."""
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return x

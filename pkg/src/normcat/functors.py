"""Functor-expression algebra on finite metric spaces and EP pairs.

Grammar::

    expr := "X" | "point" | "alphabet(" int ")" | "scale(" float "," expr ")"
          | "sum(" expr "," expr ")" | "product(" expr "," expr ")"

Each expression acts on spaces and, componentwise, on EP pairs.  Its
contraction factor for the EP norm is exact: constants 0, ``X`` 1,
``scale(c, e)`` is ``c`` times that of ``e``, sums and products take the
maximum.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError
from .metcat import (
    EpPair, FiniteMetricSpace, LipschitzMap, ProductSpace, ScaledSpace, SumSpace,
    discrete_space, point_space,
)

_TOKEN = re.compile(r"\s*(?:([A-Za-z_]+)|([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(.))")


@dataclass(frozen=True)
class Expr:
    op: str
    args: tuple = ()

    def __str__(self):
        if self.op in ("X", "point"):
            return self.op
        return f"{self.op}({', '.join(str(a) for a in self.args)})"

    @property
    def factor(self) -> float:
        op, a = self.op, self.args
        if op in ("point", "alphabet"):
            return 0.0
        if op == "X":
            return 1.0
        if op == "scale":
            return a[0] * a[1].factor
        return max(a[0].factor, a[1].factor)

    @cached_property
    def _constant(self) -> FiniteMetricSpace:
        return point_space() if self.op == "point" else discrete_space(self.args[0])

    def space(self, x: FiniteMetricSpace) -> FiniteMetricSpace:
        op, a = self.op, self.args
        if op == "X":
            return x
        if op in ("point", "alphabet"):
            return self._constant
        if op == "scale":
            return ScaledSpace(a[0], a[1].space(x))
        if op == "sum":
            return SumSpace(a[0].space(x), a[1].space(x))
        return ProductSpace(a[0].space(x), a[1].space(x))

    def _lift(self, f: EpPair):
        """``(F X, F Y, e, p)`` index arrays of the lifted pair."""
        op, a = self.op, self.args
        if op == "X":
            return f.source, f.target, f.e.assign, f.p.assign
        if op in ("point", "alphabet"):
            s = self._constant
            i = np.arange(s.size)
            return s, s, i, i
        if op == "scale":
            fx, fy, e, p = a[1]._lift(f)
            return ScaledSpace(a[0], fx), ScaledSpace(a[0], fy), e, p
        lx, ly, le, lp = a[0]._lift(f)
        rx, ry, re_, rp = a[1]._lift(f)
        if op == "sum":
            e = np.concatenate([le, re_ + ly.size])
            p = np.concatenate([lp, rp + lx.size])
            return SumSpace(lx, rx), SumSpace(ly, ry), e, p
        e = np.add.outer(le * ry.size, re_).ravel()
        p = np.add.outer(lp * rx.size, rp).ravel()
        return ProductSpace(lx, rx), ProductSpace(ly, ry), e, p

    def lift(self, f: EpPair) -> EpPair:
        fx, fy, e, p = self._lift(f)
        return EpPair(LipschitzMap(fx, fy, e), LipschitzMap(fy, fx, p), verify=False)


def parse_expr(text: str) -> Expr:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        if m.group(1):
            tokens.append(("name", m.group(1)))
        elif m.group(2):
            tokens.append(("num", m.group(2)))
        elif m.group(3) and not m.group(3).isspace():
            tokens.append(("sym", m.group(3)))
    tokens.append(("end", None))
    i = 0

    def expect(kind, value=None):
        nonlocal i
        k, v = tokens[i]
        if k != kind or (value is not None and v != value):
            raise InputError(f"functor expression: expected {value or kind} at token {i} in {text!r}")
        i += 1
        return v

    def expr():
        name = expect("name")
        if name in ("X", "point"):
            return Expr(name)
        if name == "alphabet":
            expect("sym", "(")
            raw = expect("num")
            expect("sym", ")")
            try:
                k = int(raw)
            except ValueError:
                raise InputError(f"alphabet size must be an integer, got {raw!r}") from None
            if k < 1:
                raise InputError("alphabet size must be positive")
            return Expr("alphabet", (k,))
        if name == "scale":
            expect("sym", "(")
            c = float(expect("num"))
            expect("sym", ",")
            inner = expr()
            expect("sym", ")")
            if not c > 0:
                raise InputError("scale factor must be positive")
            return Expr("scale", (c, inner))
        if name in ("sum", "product"):
            expect("sym", "(")
            left = expr()
            expect("sym", ",")
            right = expr()
            expect("sym", ")")
            return Expr(name, (left, right))
        raise InputError(f"functor expression: unknown constructor {name!r}")

    out = expr()
    expect("end")
    return out

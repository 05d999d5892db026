"""Tiny parser for series formulas written in the usual notation.

    >>> series_expr("S_y·S_x∘(S_y⁻¹·I·S_y)", S_x=sx, S_y=sy)

Precedence, loosest to tightest: ``+``/``-``, product (``·`` or ``*``),
composition (``∘`` or ``@``), postfix inverse (``⁻¹`` or ``^-1``).  So
``F·G∘H·K`` means ``F·(G∘H)·K``.  ``I`` is the composition identity and a bare
number c is the constant series c·1.  All named series must share context and
order; ``I`` and constants take theirs from the first named series.
"""

from __future__ import annotations

import re

from .mfs import MultiSeries, compose, constant_series, identity_series, mul, mul_inverse

__all__ = ["series_expr"]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<inv>⁻¹|\^-1)"
    r"|(?P<op>[-+·*∘@()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SyntaxError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, env: dict[str, MultiSeries]):
        self.toks = tokens
        self.i = 0
        self.env = env
        try:
            first = next(iter(env.values()))
        except StopIteration:
            raise ValueError("at least one named series is required") from None
        self.ctx, self.order = first.ctx, first.order

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            raise SyntaxError(f"expected {value!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> MultiSeries:
        out = self.sum()
        if self.i != len(self.toks):
            raise SyntaxError(f"trailing input {self.toks[self.i][1]!r}")
        return out

    def sum(self):
        acc = self.product()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.product()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def product(self):
        acc = self.composition()
        while self.peek()[1] in ("·", "*"):
            self.take()
            acc = mul(acc, self.composition())
        return acc

    def composition(self):
        acc = self.postfix()
        while self.peek()[1] in ("∘", "@"):
            self.take()
            acc = compose(acc, self.postfix())
        return acc

    def postfix(self):
        acc = self.atom()
        while self.peek()[0] == "inv":
            self.take()
            acc = mul_inverse(acc)
        return acc

    def atom(self):
        kind, value = self.take()
        if kind == "num":
            return constant_series(self.ctx.scalar(float(value)), self.order)
        if kind == "name":
            if value in self.env:
                return self.env[value]
            if value == "I":
                return identity_series(self.ctx, self.order)
            raise NameError(f"unknown series {value!r}")
        if value == "(":
            inner = self.sum()
            self.take(")")
            return inner
        if value == "-":
            return -self.postfix()
        raise SyntaxError(f"unexpected token {value!r}")


def series_expr(text: str, **env: MultiSeries) -> MultiSeries:
    """Evaluate a formula over named series (see module docstring)."""
    return _Parser(_tokenize(text), env).parse()

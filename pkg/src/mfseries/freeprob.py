"""Moment and cumulant series of a single operator-valued variable.

For a variable x the moment series has components ``E[x b_1 x ... b_n x]``
and the cumulant series has components ``kappa(x b_1, ..., x b_n, x)``.  Both
are plain :class:`~mfseries.mfs.MultiSeries`; a :class:`VariableSpec` bundles
one of them with its kind.

Order bookkeeping: chi is computed at the order of the moment series, while
S and T lose one degree to :func:`~mfseries.mfs.left_strip`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np

from .algebra import AlgebraContext, AlgebraElement
from .errors import LinearTermSingular, NotInvertible
from .mfs import (
    MultiSeries,
    _bprod,
    _compose_degree,
    _mul_degree,
    approx_eq_series,
    comp_inverse,
    identity_series,
    left_strip,
    mul,
    mul_inverse,
    random_series,
    zero_series,
)

__all__ = [
    "VariableSpec",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "anchor_discrepancy",
    "chi",
    "s_transform",
    "s_from_cumulants",
    "t_transform",
    "random_cumulants",
]

MAX_MEAN_CONDITION = 1e3


def moments_from_cumulants(c: MultiSeries, path: Literal["C1", "C2"] = "C1") -> MultiSeries:
    """Solve for the moment series given the cumulant series.

    ``C1``: Phi = C o (I + I.Phi.I) . (1 + I.Phi)
    ``C2``: Phi = (1 + Phi.I) . C o (I + I.Phi.I)

    Degree n of either right-hand side involves Phi only below degree n, so
    the fixed point is reached one degree per step.
    """
    if path not in ("C1", "C2"):
        raise ValueError(f"unknown path {path!r}")
    ctx, d, D = c.ctx, c.ctx.d, c.ctx.D
    phi = zero_series(ctx, c.order)
    # degree m of C o (I + I.Phi.I) only sees Phi below m - 1, so it is final
    # once computed
    composed = [c.coeffs[0]]
    for n in range(c.order + 1):
        p = phi.truncate(n)
        one = identity_series(ctx, n)
        if n >= 1:
            inner = one + one * p * one
            composed.append(_compose_degree(c.coeffs, inner.coeffs, n, D))
        if path == "C1":
            rhs = _mul_degree(composed, (1 + one * p).coeffs, n, d)
        else:
            rhs = _mul_degree((1 + p * one).coeffs, composed, n, d)
        phi = phi.replace(n, rhs)
    return phi


def _fill(ck: np.ndarray, fillers: list[np.ndarray], D: int) -> np.ndarray:
    """Plug multilinear maps (coefficient arrays) into the slots of ck, in order."""
    t = ck.reshape(D, -1, 1)  # (out, open slots, expanded args)
    for f in reversed(fillers):
        out, rest, done = t.shape
        t = t.reshape(out, rest // D, D, done)
        t = np.tensordot(t, f, axes=([2], [0]))  # (out, rest/D, done, new)
        t = t.transpose(0, 1, 3, 2).reshape(out, rest // D, -1)
    return t.reshape(D, -1)


def cumulants_from_moments(phi: MultiSeries,
                           anchor: Literal["first", "last"] = "first") -> MultiSeries:
    """Invert the moment-cumulant recursion, isolating the top cumulant.

    With ``anchor="first"`` the block containing the first x is expanded:

        E[x b_1 x ... b_n x] = sum_{k, q_1<...<q_k}
            kappa(x E[b_1 x .. b_{q_1}], ..., x E[..], x) E[b_{q_k+1} x .. b_n x]

    and ``anchor="last"`` expands the block of the last x instead.  The term
    with every q present is the full cumulant with coefficient 1.
    """
    if anchor not in ("first", "last"):
        raise ValueError(f"unknown anchor {anchor!r}")
    ctx, d, D = phi.ctx, phi.ctx.d, phi.ctx.D
    unit = ctx.unit().coefficients.reshape(D, 1)
    eye = np.eye(D, dtype=complex)
    pc = phi.coeffs

    def between(length: int) -> np.ndarray:
        # E[b x b' ... x b''] with `length` spacers
        if length == 1:
            return eye
        return _bprod(_bprod(eye, pc[length - 2], d), eye, d)

    def tail(length: int) -> np.ndarray:
        # E[b x ... b x]
        return unit if length == 0 else _bprod(eye, pc[length - 1], d)

    def head(length: int) -> np.ndarray:
        # E[x b ... x b]
        return unit if length == 0 else _bprod(pc[length - 1], eye, d)

    c: list[np.ndarray] = []
    for n in range(phi.order + 1):
        lower = np.zeros((D, D ** n), dtype=complex)
        for k in range(n + 1):
            if anchor == "first":
                for q in combinations(range(1, n + 1), k):
                    if k == n:
                        continue  # the unknown top cumulant
                    cuts = (0,) + q
                    gaps = [between(cuts[j + 1] - cuts[j]) for j in range(k)]
                    lower += _bprod(_fill(c[k], gaps, D), tail(n - cuts[-1]), d)
            else:
                for s in combinations(range(n), k):
                    if k == n:
                        continue
                    cuts = s + (n,)
                    gaps = [between(cuts[j + 1] - cuts[j]) for j in range(k)]
                    lower += _bprod(head(cuts[0]), _fill(c[k], gaps, D), d)
        c.append(pc[n] - lower)
    return MultiSeries(ctx, c)


def anchor_discrepancy(phi: MultiSeries) -> float:
    """Max deviation between cumulants extracted with the two anchorings."""
    return approx_eq_series(cumulants_from_moments(phi, "first"),
                            cumulants_from_moments(phi, "last")).max_dev


def chi(phi: MultiSeries) -> MultiSeries:
    """Compositional inverse of I.Phi; exists iff E[x] = Phi_0 is invertible."""
    if phi.order < 1:
        raise ValueError("chi needs a moment series of order >= 1")
    one = identity_series(phi.ctx, phi.order)
    try:
        return comp_inverse(one * phi)
    except LinearTermSingular as exc:
        raise LinearTermSingular(f"E[x] not invertible: {exc}") from exc


def s_transform(phi: MultiSeries) -> MultiSeries:
    """S with (1 + I).chi = I.S; order drops by one."""
    ch = chi(phi)
    one = identity_series(phi.ctx, phi.order)
    return left_strip((1 + one) * ch)


def s_from_cumulants(c: MultiSeries) -> MultiSeries:
    """S from the cumulant series: I.S is the compositional inverse of I.C."""
    if c.order < 1:
        raise ValueError("needs a cumulant series of order >= 1")
    one = identity_series(c.ctx, c.order)
    try:
        inv = comp_inverse(one * c)
    except LinearTermSingular as exc:
        raise LinearTermSingular(f"E[x] not invertible: {exc}") from exc
    return left_strip(inv)


def t_transform(phi: MultiSeries) -> MultiSeries:
    """Multiplicative inverse of the S-transform."""
    return mul_inverse(s_transform(phi))


def random_cumulants(ctx: AlgebraContext, order: int, rng: np.random.Generator,
                     scale: float = 0.3) -> MultiSeries:
    """Random cumulant series with a well-conditioned mean.

    kappa_1 = 1 + scale * U with U uniform in the complex square [-1, 1]^2,
    redrawn until its condition number is at most 1e3; higher cumulant
    coefficients are uniform in [-scale, scale]^2.
    """
    while True:
        mean = ctx.unit() + ctx.random_element(rng, 1.0) * scale
        if np.linalg.cond(mean.entries) <= MAX_MEAN_CONDITION:
            break
    return random_series(ctx, order, rng, scale=scale, constant=mean)


@dataclass(frozen=True, eq=False)
class VariableSpec:
    """A random variable known through its cumulant or moment series."""

    ctx: AlgebraContext
    order: int
    kind: Literal["cumulants", "moments"]
    series: MultiSeries

    def __post_init__(self):
        if self.kind not in ("cumulants", "moments"):
            raise ValueError(f"unknown kind {self.kind!r}")
        self.ctx.check(self.series.ctx)
        if self.series.order != self.order:
            raise ValueError(f"series order {self.series.order} != {self.order}")

    @classmethod
    def from_cumulants(cls, c: MultiSeries) -> VariableSpec:
        return cls(c.ctx, c.order, "cumulants", c)

    @classmethod
    def from_moments(cls, phi: MultiSeries) -> VariableSpec:
        return cls(phi.ctx, phi.order, "moments", phi)

    @classmethod
    def random(cls, ctx: AlgebraContext, order: int, rng: np.random.Generator,
               scale: float = 0.3) -> VariableSpec:
        return cls.from_cumulants(random_cumulants(ctx, order, rng, scale))

    def cumulants(self) -> MultiSeries:
        return self.series if self.kind == "cumulants" else cumulants_from_moments(self.series)

    def moments(self, path: Literal["C1", "C2"] = "C1") -> MultiSeries:
        return self.series if self.kind == "moments" else moments_from_cumulants(self.series, path)

    def mean(self) -> AlgebraElement:
        return self.series.constant

    def has_invertible_mean(self) -> bool:
        try:
            self.mean().inverse()
        except NotInvertible:
            return False
        return True

    def chi(self) -> MultiSeries:
        return chi(self.moments())

    def s_transform(self) -> MultiSeries:
        if self.kind == "cumulants":
            return s_from_cumulants(self.series)
        return s_transform(self.series)

    def t_transform(self) -> MultiSeries:
        return mul_inverse(self.s_transform())

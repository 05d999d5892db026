"""Products of two variables free with amalgamation over B.

Given cumulant series C_x, C_y, the moments of xy are obtained together with
two auxiliary series

    phi          E[xy b_1 xy ... b_n xy]
    phi_y_left   E[y b_1 xy ... b_n xy]
    phi_x_right  E[xy b_1 ... xy b_n x]

from the coupled relations

    (P1)  phi         = C_x o (phi_y_left . I) . phi_y_left
    (P2)  phi         = phi_x_right . C_y o (I . phi_x_right)
    (P3)  phi_y_left  = C_y o (I . phi_x_right) . (1 + I . phi)
    (P4)  phi_x_right = (1 + phi . I) . C_x o (phi_y_left . I)

Per degree, P3 then P4 then P1 only reference already-known data; P2 is kept
out of the recursion and checked afterwards.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import AlgebraContext
from .errors import ConsistencyFailure
from .freeprob import chi, s_from_cumulants, s_transform
from .mfs import (
    MultiSeries,
    _compose_degree,
    _mul_degree,
    approx_eq_series,
    identity_series,
    mul_inverse,
    zero_series,
)

__all__ = [
    "ProductTriple",
    "VerificationReport",
    "product_moment_triple",
    "psi2_residual",
    "twisted_rhs",
    "diag_ipsi",
    "diag_phichi",
    "lemma_residuals",
    "verify_twisted",
]

PSI2_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProductTriple:
    ctx: AlgebraContext
    order: int
    phi: MultiSeries
    phi_y_left: MultiSeries
    phi_x_right: MultiSeries


def psi2_residual(triple: ProductTriple, c_y: MultiSeries) -> tuple[float, ...]:
    """Per-degree deviation of phi from phi_x_right . C_y o (I . phi_x_right)."""
    one = identity_series(triple.ctx, triple.order)
    rhs = triple.phi_x_right * c_y(one * triple.phi_x_right)
    return approx_eq_series(triple.phi, rhs).per_degree


def product_moment_triple(c_x: MultiSeries, c_y: MultiSeries, check: bool = True) -> ProductTriple:
    """Solve the coupled system for the moments of xy.

    Raises ConsistencyFailure if the independent relation P2 is violated by
    more than ``PSI2_TOL`` relative to the size of phi.
    """
    c_x.ctx.check(c_y.ctx)
    if c_x.order != c_y.order:
        raise ValueError(f"order {c_x.order} vs {c_y.order}")
    ctx, N, d, D = c_x.ctx, c_x.order, c_x.ctx.d, c_x.ctx.D

    phi = zero_series(ctx, N)
    yl = zero_series(ctx, N)
    xr = zero_series(ctx, N)
    # C_y o (I.xr) and C_x o (yl.I) at degree m need xr / yl below m only
    cy_comp = [c_y.coeffs[0]]
    cx_comp = [c_x.coeffs[0]]

    for n in range(N + 1):
        one = identity_series(ctx, n)
        p, l_, r_ = phi.truncate(n), yl.truncate(n), xr.truncate(n)
        if n >= 1:
            cy_comp.append(_compose_degree(c_y.coeffs, (one * r_).coeffs, n, D))
            cx_comp.append(_compose_degree(c_x.coeffs, (l_ * one).coeffs, n, D))
        # P3
        yl_n = _mul_degree(cy_comp, (1 + one * p).coeffs, n, d)
        yl = yl.replace(n, yl_n)
        # P4
        xr_n = _mul_degree((1 + p * one).coeffs, cx_comp, n, d)
        xr = xr.replace(n, xr_n)
        # P1, using the fresh degree-n entry of phi_y_left
        phi_n = _mul_degree(cx_comp, yl.truncate(n).coeffs, n, d)
        phi = phi.replace(n, phi_n)

    triple = ProductTriple(ctx, N, phi, yl, xr)
    if check:
        res = max(psi2_residual(triple, c_y))
        if res > PSI2_TOL * max(1.0, phi.max_abs()):
            raise ConsistencyFailure(f"P2 residual {res:.3e} exceeds tolerance")
    return triple


def twisted_rhs(s_x: MultiSeries, s_y: MultiSeries) -> MultiSeries:
    """S_y . S_x o (S_y^{-1} . I . S_y)."""
    one = identity_series(s_x.ctx, s_x.order)
    return s_y * s_x(mul_inverse(s_y) * one * s_y)


def diag_ipsi(triple: ProductTriple, c_y: MultiSeries) -> tuple[float, ...]:
    """Per-degree residual of (I . phi_x_right) o chi_xy = I . S_y."""
    one = identity_series(triple.ctx, triple.order)
    ch = chi(triple.phi)
    lhs = (one * triple.phi_x_right)(ch)
    rhs = one * s_from_cumulants(c_y).pad(triple.order)
    return approx_eq_series(lhs, rhs).per_degree


def diag_phichi(triple: ProductTriple, c_y: MultiSeries) -> tuple[float, ...]:
    """Per-degree residual of phi_y_left o chi_xy = S_y^{-1} . (1 + I).

    Compared at order N - 1, the order of S_y.
    """
    ch = chi(triple.phi)
    lhs = triple.phi_y_left(ch).truncate(triple.order - 1)
    s_y = s_from_cumulants(c_y)
    rhs = mul_inverse(s_y) * (1 + identity_series(triple.ctx, s_y.order))
    return approx_eq_series(lhs, rhs).per_degree


def lemma_residuals(c: MultiSeries, s: MultiSeries | None = None) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Per-degree residuals of (I.C) o (I.S) = I and (I.S) o (I.C) = I."""
    if s is None:
        s = s_from_cumulants(c)
    one = identity_series(c.ctx, c.order)
    ic, is_ = one * c, one * s.pad(c.order)
    return (approx_eq_series(ic(is_), one).per_degree,
            approx_eq_series(is_(ic), one).per_degree)


def _worst(*rows):
    return [max(vals) for vals in zip(*rows)]


@dataclass
class VerificationReport:
    """Outcome of one end-to-end check of the twisted product formula.

    Every residual list is indexed by degree.  ``passed`` holds iff every
    residual is within ``tolerance``.
    """

    seed: int | None
    dim: int
    order: int
    tolerance: float
    theorem: list[float]
    psi2: list[float]
    ipsi: list[float]
    phichi: list[float]
    lemma: list[float]
    passed: bool = False
    wall_time: float | None = field(default=None, compare=False)

    def max_deviation(self) -> float:
        return max(max(v) for v in (self.theorem, self.psi2, self.ipsi, self.phichi, self.lemma))

    def to_dict(self, timing: bool = False) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("wall_time")
        return out


def verify_twisted(c_x: MultiSeries, c_y: MultiSeries, tol: float = 1e-8,
                   seed: int | None = None) -> VerificationReport:
    """Check S_xy against S_y . S_x o (S_y^{-1} . I . S_y) and the proof chain."""
    start = time.perf_counter()
    triple = product_moment_triple(c_x, c_y, check=False)
    s_xy = s_transform(triple.phi)
    s_x = s_from_cumulants(c_x)
    s_y = s_from_cumulants(c_y)
    theorem = approx_eq_series(s_xy, twisted_rhs(s_x, s_y)).per_degree
    lemma = _worst(*lemma_residuals(c_x, s_x), *lemma_residuals(c_y, s_y))
    report = VerificationReport(
        seed=seed,
        dim=c_x.ctx.d,
        order=c_x.order,
        tolerance=tol,
        theorem=list(theorem),
        psi2=list(psi2_residual(triple, c_y)),
        ipsi=list(diag_ipsi(triple, c_y)),
        phichi=list(diag_phichi(triple, c_y)),
        lemma=list(lemma),
    )
    report.passed = bool(report.max_deviation() <= tol)
    report.wall_time = time.perf_counter() - start
    return report

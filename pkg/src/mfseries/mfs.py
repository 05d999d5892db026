"""Truncated multilinear function series over M_d(C).

A series ``F = F_0 + F_1(b_1) + F_2(b_1, b_2) + ...`` is kept up to a fixed
truncation order N.  Component n is an n-linear map B^n -> B stored densely as
a complex array of shape ``(D, D**n)``: entry ``[o, flat(i_1, ..., i_n)]`` is
the o-th basis coordinate of ``F_n(e_{i_1}, ..., e_{i_n})``, with the argument
multi-index flattened row-major.

Operator conventions on :class:`MultiSeries`:

* ``F + G``, ``F - G``, ``-F``: componentwise.
* ``F * G``: the Cauchy-type product, outer products taken in B.
* ``F(G)``: composition ``F o G`` (``G_0`` must vanish).  Python's call syntax
  binds tighter than ``*``, which matches the usual convention that
  composition binds stronger than product: ``F * G(H) * K`` is ``F.(G o H).K``.
* Numbers and :class:`AlgebraElement` operands are promoted to constant series.

Every degree-n output depends only on inputs of degree <= n and is computed by
the same code path whatever the truncation order, so truncating inputs and
recomputing reproduces the prefix of the result bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import AlgebraContext, AlgebraElement, checked_inverse
from .errors import (
    ContextMismatch,
    DegreeOutOfRange,
    LinearTermSingular,
    NonzeroConstantTerm,
    NotInvertible,
    NotLeftMultipleOfI,
    OrderMismatch,
)

__all__ = [
    "MultilinearMap",
    "MultiSeries",
    "SeriesComparison",
    "identity_series",
    "constant_series",
    "zero_series",
    "random_series",
    "add",
    "scale",
    "mul",
    "compose",
    "mul_inverse",
    "comp_inverse",
    "left_strip",
    "evaluate",
    "approx_eq_series",
]

_Scalar = (int, float, complex, np.number)


# ---------------------------------------------------------------------------
# raw kernels on coefficient arrays
# ---------------------------------------------------------------------------

def _bprod(a: np.ndarray, b: np.ndarray, d: int) -> np.ndarray:
    """Coefficients of (b_1..b_k, c_1..c_m) -> A(b) B(c), product taken in B."""
    D = d * d
    # out[p, q] = a[p, :, :].T @ b[:, q, :], batched over (p, q)
    a4 = a.reshape(d, d, -1).transpose(0, 2, 1)[:, None]  # (p, 1, A, r)
    b4 = b.reshape(d, d, -1).transpose(1, 0, 2)[None]     # (1, q, r, B)
    return np.matmul(a4, b4).reshape(D, a.shape[1] * b.shape[1])


def _mul_degree(f: Sequence[np.ndarray], g: Sequence[np.ndarray], n: int, d: int) -> np.ndarray:
    out = _bprod(f[0], g[n], d)
    for k in range(1, n + 1):
        out += _bprod(f[k], g[n - k], d)
    return out


def _compose_degree(f: Sequence[np.ndarray], g: Sequence[np.ndarray], n: int, D: int,
                    kmin: int = 1) -> np.ndarray:
    """Degree-n component of F o G restricted to terms F_k with k >= kmin.

    Sums F_k(G_{p_1}(..), ..., G_{p_k}(..)) over ordered compositions
    p_1 + ... + p_k = n, p_i >= 1.  Slots of F_k are filled right to left;
    compositions sharing a suffix share the partial contraction.
    """
    total = np.zeros((D, D ** n), dtype=complex)
    g_t = [None] + [np.ascontiguousarray(gp.T) for gp in g[1:n + 1]]
    for k in range(kmin, n + 1):
        # partial[m]: shape (D, D**r, D**m) with r slots of F_k still open and
        # the closed slots already expanded into m arguments
        partial = {0: f[k].reshape(D, D ** k, 1)}
        for r in range(k, 0, -1):
            nxt: dict[int, np.ndarray] = {}
            for m, arr in partial.items():
                # leave at least one degree for each of the r - 1 open slots
                lo = n - m if r == 1 else 1
                for p in range(lo, n - m - (r - 1) + 1):
                    # close the last open slot: (.., s, M) -> (.., P, M)
                    t = np.matmul(g_t[p], arr.reshape(D ** r, D, D ** m))
                    t = t.reshape(D, D ** (r - 1), D ** (p + m))
                    if m + p in nxt:
                        nxt[m + p] += t
                    else:
                        nxt[m + p] = t
            partial = nxt
        if n in partial:
            total += partial[n].reshape(D, D ** n)
    return total


def _apply(coeffs: np.ndarray, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Contract the argument slots of a (D, D**n) array with coordinate vectors."""
    D = coeffs.shape[0]
    t = coeffs
    for v in reversed(vectors):
        t = t.reshape(-1, D) @ v
    return t.reshape(D)


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultilinearMap:
    """One homogeneous component F_n : B^n -> B."""

    ctx: AlgebraContext
    arity: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        D = self.ctx.D
        c = np.array(self.coeffs, dtype=complex)
        if self.arity == 0 and c.shape == (D,):
            c = c.reshape(D, 1)
        if c.shape != (D, D ** self.arity):
            raise ValueError(f"degree {self.arity} needs shape {(D, D ** self.arity)}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def tensor(self) -> np.ndarray:
        """Coefficients with one axis per argument, shape (D,) * (arity + 1)."""
        return self.coeffs.reshape((self.ctx.D,) * (self.arity + 1))

    def __call__(self, *args: AlgebraElement) -> AlgebraElement:
        if len(args) != self.arity:
            raise TypeError(f"expected {self.arity} arguments, got {len(args)}")
        for b in args:
            self.ctx.check(b.ctx)
        out = _apply(self.coeffs, [b.coefficients for b in args])
        return self.ctx.from_coefficients(out)


@dataclass(frozen=True, eq=False)
class SeriesComparison:
    """Outcome of :func:`approx_eq_series`; truthy iff the series agree."""

    ok: bool
    tol: float
    max_dev: float
    degree: int
    index: tuple[int, ...]
    per_degree: tuple[float, ...]

    def __bool__(self):
        return self.ok


class MultiSeries:
    """A multilinear function series truncated at order N (immutable)."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: AlgebraContext, coeffs: Sequence[np.ndarray]):
        D = ctx.D
        if len(coeffs) == 0:
            raise ValueError("a series needs at least its constant term")
        arrs = []
        for n, c in enumerate(coeffs):
            a = np.asarray(c, dtype=complex)
            if a.flags.writeable:
                a = a.copy()
            if n == 0 and a.shape == (D,):
                a = a.reshape(D, 1)
            if a.shape != (D, D ** n):
                raise ValueError(f"degree {n} needs shape {(D, D ** n)}, got {a.shape}")
            a.setflags(write=False)
            arrs.append(a)
        self.ctx = ctx
        self.coeffs = tuple(arrs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"MultiSeries(d={self.ctx.d}, order={self.order})"

    def component(self, n: int) -> MultilinearMap:
        if not 0 <= n <= self.order:
            raise DegreeOutOfRange(f"degree {n} outside 0..{self.order}")
        return MultilinearMap(self.ctx, n, self.coeffs[n])

    def __getitem__(self, n: int) -> MultilinearMap:
        return self.component(n)

    @property
    def constant(self) -> AlgebraElement:
        return self.ctx.from_coefficients(self.coeffs[0][:, 0])

    def linear_matrix(self) -> np.ndarray:
        """F_1 as a D x D matrix acting on basis coordinates."""
        if self.order < 1:
            raise DegreeOutOfRange("series has no linear term")
        return self.coeffs[1]

    def truncate(self, order: int) -> MultiSeries:
        if order > self.order:
            raise DegreeOutOfRange(f"cannot truncate order {self.order} to {order}")
        return MultiSeries(self.ctx, self.coeffs[: order + 1])

    def pad(self, order: int) -> MultiSeries:
        """Extend with zero components up to ``order``."""
        D = self.ctx.D
        extra = [np.zeros((D, D ** n), dtype=complex) for n in range(self.order + 1, order + 1)]
        return MultiSeries(self.ctx, list(self.coeffs) + extra)

    def replace(self, n: int, coeffs: np.ndarray) -> MultiSeries:
        new = list(self.coeffs)
        new[n] = coeffs
        return MultiSeries(self.ctx, new)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(c))) for c in self.coeffs)

    # arithmetic ---------------------------------------------------------

    def _promote(self, other) -> MultiSeries | None:
        if isinstance(other, MultiSeries):
            return other
        if isinstance(other, AlgebraElement):
            return constant_series(other, self.order)
        if isinstance(other, _Scalar):
            return constant_series(self.ctx.scalar(other), self.order)
        return None

    def __add__(self, other):
        o = self._promote(other)
        return NotImplemented if o is None else add(self, o)

    def __radd__(self, other):
        o = self._promote(other)
        return NotImplemented if o is None else add(o, self)

    def __sub__(self, other):
        o = self._promote(other)
        return NotImplemented if o is None else add(self, scale(o, -1))

    def __rsub__(self, other):
        o = self._promote(other)
        return NotImplemented if o is None else add(o, scale(self, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, _Scalar):
            return scale(self, other)
        o = self._promote(other)
        return NotImplemented if o is None else mul(self, o)

    def __rmul__(self, other):
        if isinstance(other, _Scalar):
            return scale(self, other)
        o = self._promote(other)
        return NotImplemented if o is None else mul(o, self)

    def __call__(self, inner: MultiSeries) -> MultiSeries:
        return compose(self, inner)

    def inverse(self) -> MultiSeries:
        return mul_inverse(self)

    def comp_inverse(self) -> MultiSeries:
        return comp_inverse(self)

    def evaluate(self, n: int, args: Sequence[AlgebraElement]) -> AlgebraElement:
        return evaluate(self, n, args)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def zero_series(ctx: AlgebraContext, order: int) -> MultiSeries:
    D = ctx.D
    return MultiSeries(ctx, [np.zeros((D, D ** n), dtype=complex) for n in range(order + 1)])


def identity_series(ctx: AlgebraContext, order: int) -> MultiSeries:
    """I with I_n(b_1..b_n) = delta_{n1} b_1."""
    z = zero_series(ctx, order)
    if order < 1:
        return z
    return z.replace(1, np.eye(ctx.D, dtype=complex))


def constant_series(b: AlgebraElement, order: int) -> MultiSeries:
    return zero_series(b.ctx, order).replace(0, b.coefficients.reshape(-1, 1))


def random_series(ctx: AlgebraContext, order: int, rng: np.random.Generator,
                  scale: float = 0.3, constant: AlgebraElement | None = None) -> MultiSeries:
    """Components with entries uniform in the complex square [-scale, scale]^2."""
    D = ctx.D
    coeffs = []
    for n in range(order + 1):
        shape = (D, D ** n)
        coeffs.append(rng.uniform(-scale, scale, shape) + 1j * rng.uniform(-scale, scale, shape))
    if constant is not None:
        coeffs[0] = constant.coefficients.reshape(-1, 1)
    return MultiSeries(ctx, coeffs)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _check_pair(f: MultiSeries, g: MultiSeries) -> None:
    if not f.ctx.compatible(g.ctx):
        raise ContextMismatch(f"M_{f.ctx.d} vs M_{g.ctx.d}")
    if f.order != g.order:
        raise OrderMismatch(f"order {f.order} vs {g.order}")


def add(f: MultiSeries, g: MultiSeries) -> MultiSeries:
    _check_pair(f, g)
    return MultiSeries(f.ctx, [a + b for a, b in zip(f.coeffs, g.coeffs)])


def scale(f: MultiSeries, c: complex) -> MultiSeries:
    return MultiSeries(f.ctx, [c * a for a in f.coeffs])


def mul(f: MultiSeries, g: MultiSeries) -> MultiSeries:
    """(F.G)_n(b_1..b_n) = sum_k F_k(b_1..b_k) G_{n-k}(b_{k+1}..b_n)."""
    _check_pair(f, g)
    d = f.ctx.d
    return MultiSeries(f.ctx, [_mul_degree(f.coeffs, g.coeffs, n, d) for n in range(f.order + 1)])


def _inner_coeffs(g: MultiSeries) -> list[np.ndarray]:
    """Coefficients of a composition argument with its constant term snapped to 0."""
    dev = float(np.max(np.abs(g.coeffs[0])))
    if dev > g.ctx.tol:
        raise NonzeroConstantTerm(f"inner series has constant term of size {dev:.3e}")
    return [np.zeros_like(g.coeffs[0])] + list(g.coeffs[1:])


def compose(f: MultiSeries, g: MultiSeries) -> MultiSeries:
    """F o G for G with vanishing constant term."""
    _check_pair(f, g)
    gc = _inner_coeffs(g)
    D = f.ctx.D
    out = [f.coeffs[0]]
    out += [_compose_degree(f.coeffs, gc, n, D) for n in range(1, f.order + 1)]
    return MultiSeries(f.ctx, out)


def mul_inverse(f: MultiSeries) -> MultiSeries:
    """G with F.G = G.F = 1, solved degree by degree from G_0 = F_0^{-1}."""
    ctx, d = f.ctx, f.ctx.d
    f0_inv = checked_inverse(f.constant.entries, NotInvertible, "constant term")
    left = f0_inv.reshape(d, d)
    g = [f0_inv.reshape(-1, 1)]
    for n in range(1, f.order + 1):
        acc = _bprod(f.coeffs[1], g[n - 1], d)
        for k in range(2, n + 1):
            acc = acc + _bprod(f.coeffs[k], g[n - k], d)
        # left-multiply by -F_0^{-1}
        g.append(-np.tensordot(left, acc.reshape(d, d, -1), axes=([1], [0])).reshape(ctx.D, -1))
    return MultiSeries(ctx, g)


def comp_inverse(f: MultiSeries) -> MultiSeries:
    """G with F o G = G o F = I, solved degree by degree from G_1 = F_1^{-1}."""
    ctx, D = f.ctx, f.ctx.D
    fc = _inner_coeffs(f)
    if f.order < 1:
        return zero_series(ctx, f.order)
    lin_inv = checked_inverse(fc[1], LinearTermSingular, "linear term")
    g = [np.zeros((D, 1), dtype=complex), lin_inv]
    for n in range(2, f.order + 1):
        g.append(np.zeros((D, D ** n), dtype=complex))
        higher = _compose_degree(fc, g, n, D, kmin=2)
        g[n] = -lin_inv @ higher
    return MultiSeries(ctx, g)


def left_strip(h: MultiSeries) -> MultiSeries:
    """K of order N-1 with H = I.K, validated by reconstruction.

    ``K_{n-1}(b_2..b_n) = H_n(1, b_2..b_n)``; if I.K does not reproduce H
    (to ``tol`` relative to max(1, |H|)) the input is not a left multiple of I.
    """
    ctx, D = h.ctx, h.ctx.D
    if h.order < 1:
        raise DegreeOutOfRange("left_strip needs order >= 1")
    _inner_coeffs(h)
    unit = ctx.unit().coefficients
    k = [np.tensordot(h.coeffs[n].reshape(D, D, -1), unit, axes=([1], [0])).reshape(D, D ** (n - 1))
         for n in range(1, h.order + 1)]
    stripped = MultiSeries(ctx, k)
    rebuilt = mul(identity_series(ctx, h.order), stripped.pad(h.order))
    tol = ctx.tol * max(1.0, h.max_abs())
    cmp = approx_eq_series(rebuilt, h.replace(0, np.zeros((D, 1))), tol)
    if not cmp:
        raise NotLeftMultipleOfI(
            f"reconstruction deviates by {cmp.max_dev:.3e} at degree {cmp.degree}")
    return stripped


def evaluate(f: MultiSeries, n: int, args: Sequence[AlgebraElement]) -> AlgebraElement:
    if not 0 <= n <= f.order:
        raise DegreeOutOfRange(f"degree {n} outside 0..{f.order}")
    return f.component(n)(*args)


def approx_eq_series(f: MultiSeries, g: MultiSeries, tol: float | None = None) -> SeriesComparison:
    _check_pair(f, g)
    tol = f.ctx.tol if tol is None else tol
    D = f.ctx.D
    per_degree = []
    best = (-1.0, 0, (0,))
    for n, (a, b) in enumerate(zip(f.coeffs, g.coeffs)):
        diff = np.abs(a - b)
        flat = int(np.argmax(diff))
        dev = float(diff.flat[flat])
        per_degree.append(dev)
        if dev > best[0]:
            o, rest = divmod(flat, D ** n)
            idx = (o,) + (np.unravel_index(rest, (D,) * n) if n else ())
            best = (dev, n, tuple(int(i) for i in idx))
    return SeriesComparison(ok=best[0] <= tol, tol=tol, max_dev=best[0], degree=best[1],
                            index=best[2], per_degree=tuple(per_degree))

"""The base algebra B = M_d(C) of "scalars".

Elements are stored as dense d x d complex matrices.  The linear basis used
everywhere else in the package is the matrix-unit basis ``e_{ij}`` with flat
index ``i*d + j`` (row-major), so the coefficient vector of an element is
simply its entries in C order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import ContextMismatch, NotInvertible

__all__ = [
    "DEFAULT_TOL",
    "PIVOT_THRESHOLD",
    "AlgebraContext",
    "AlgebraElement",
    "elem_mul",
    "elem_inverse",
    "approx_eq_elem",
    "checked_inverse",
]

DEFAULT_TOL = 1e-9

# relative to the max-norm of the matrix being factored
PIVOT_THRESHOLD = 1e-12


def checked_inverse(matrix: np.ndarray, error=NotInvertible, what: str = "matrix") -> np.ndarray:
    """Invert a square matrix, refusing numerically singular input.

    LU with partial pivoting is used; the matrix is declared singular when the
    smallest pivot magnitude falls below ``PIVOT_THRESHOLD`` times the largest
    absolute entry.  The test depends only on the input, so the outcome is
    deterministic.
    """
    a = np.asarray(matrix, dtype=complex)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        raise error(f"{what} is zero")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    pivot = np.min(np.abs(np.diag(lu)))
    if pivot < PIVOT_THRESHOLD * scale:
        raise error(f"{what} is singular (pivot {pivot:.3e}, max entry {scale:.3e})")
    return scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0], dtype=complex))


@dataclass(frozen=True)
class AlgebraContext:
    """The matrix algebra M_d(C) together with a default comparison tolerance."""

    d: int
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ValueError(f"matrix size must be a positive integer, got {self.d!r}")
        if self.tol < 0:
            raise ValueError("tolerance must be nonnegative")

    @property
    def D(self) -> int:
        return self.d * self.d

    @cached_property
    def basis(self) -> tuple[AlgebraElement, ...]:
        return tuple(self.matrix_unit(i, j) for i in range(self.d) for j in range(self.d))

    def compatible(self, other: AlgebraContext) -> bool:
        return self.d == other.d

    def check(self, other: AlgebraContext) -> None:
        if not self.compatible(other):
            raise ContextMismatch(f"M_{self.d} vs M_{other.d}")

    def element(self, entries) -> AlgebraElement:
        return AlgebraElement(self, entries)

    def from_coefficients(self, vec) -> AlgebraElement:
        return AlgebraElement(self, np.asarray(vec, dtype=complex).reshape(self.d, self.d))

    def unit(self) -> AlgebraElement:
        return AlgebraElement(self, np.eye(self.d, dtype=complex))

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros((self.d, self.d), dtype=complex))

    def scalar(self, c: complex) -> AlgebraElement:
        return AlgebraElement(self, c * np.eye(self.d, dtype=complex))

    def matrix_unit(self, i: int, j: int) -> AlgebraElement:
        m = np.zeros((self.d, self.d), dtype=complex)
        m[i, j] = 1.0
        return AlgebraElement(self, m)

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> AlgebraElement:
        """Entries uniform in the complex square [-scale, scale]^2."""
        shape = (self.d, self.d)
        re = rng.uniform(-scale, scale, size=shape)
        im = rng.uniform(-scale, scale, size=shape)
        return AlgebraElement(self, re + 1j * im)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    ctx: AlgebraContext
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (self.ctx.d, self.ctx.d):
            raise ValueError(f"expected a {self.ctx.d}x{self.ctx.d} matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def coefficients(self) -> np.ndarray:
        """Coordinates in the matrix-unit basis (length d*d)."""
        return self.entries.reshape(self.ctx.D)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, AlgebraElement):
            self.ctx.check(other.ctx)
            return other.entries
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return AlgebraElement(self.ctx, self.entries + o)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return AlgebraElement(self.ctx, self.entries - o)

    def __neg__(self):
        return AlgebraElement(self.ctx, -self.entries)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return elem_mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return AlgebraElement(self.ctx, self.entries * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return AlgebraElement(self.ctx, other * self.entries)
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, AlgebraElement):
            return elem_mul(self, other)
        return NotImplemented

    def inverse(self) -> AlgebraElement:
        return elem_inverse(self)

    def norm(self) -> float:
        """Max-norm (largest absolute entry)."""
        return float(np.max(np.abs(self.entries)))

    def approx_eq(self, other: AlgebraElement, tol: float | None = None) -> bool:
        return approx_eq_elem(self, other, self.ctx.tol if tol is None else tol)


def elem_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a.ctx.check(b.ctx)
    return AlgebraElement(a.ctx, a.entries @ b.entries)


def elem_inverse(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.ctx, checked_inverse(a.entries, NotInvertible, "algebra element"))


def approx_eq_elem(a: AlgebraElement, b: AlgebraElement, tol: float) -> bool:
    a.ctx.check(b.ctx)
    return bool(np.max(np.abs(a.entries - b.entries)) <= tol)

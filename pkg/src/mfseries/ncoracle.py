"""Brute-force moments by summing over non-crossing partitions.

Deliberately naive and independent of the series engine: the only shared
code is matrix arithmetic on :class:`AlgebraElement`.  A moment

    E[a_1 s_1 a_2 s_2 ... s_{m-1} a_m]

(letters a_i in {x, y}, spacers s_i in B) is the sum over non-crossing
partitions pi of {1..m} of the nested cumulant evaluation of pi; blocks that
mix x and y contribute zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Literal, Sequence

import numpy as np

from .algebra import AlgebraContext, AlgebraElement
from .errors import SizeLimitExceeded
from .mfs import MultilinearMap, MultiSeries

__all__ = [
    "MAX_GROUND_SET",
    "NCPartition",
    "ColoredWord",
    "enumerate_nc",
    "is_noncrossing",
    "evaluate_partition",
    "oracle_moments",
    "product_moments",
]

MAX_GROUND_SET = 10

Color = Literal["X", "Y"]


@dataclass(frozen=True)
class NCPartition:
    """A partition of {1..m}; blocks are sorted tuples, ordered by minimum."""

    m: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        covered = sorted(i for b in self.blocks for i in b)
        if covered != list(range(1, self.m + 1)):
            raise ValueError(f"blocks do not partition 1..{self.m}")
        if not is_noncrossing(self.blocks):
            raise ValueError(f"crossing blocks {self.blocks}")


def is_noncrossing(blocks: Sequence[Sequence[int]]) -> bool:
    """Quadruple scan: no a < b < c < d with a, c in one block and b, d in another."""
    owner = {i: k for k, blk in enumerate(blocks) for i in blk}
    pts = sorted(owner)
    for a, b, c, d in _quadruples(pts):
        if owner[a] == owner[c] and owner[b] == owner[d] and owner[a] != owner[b]:
            return False
    return True


def _quadruples(pts):
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    yield pts[i], pts[j], pts[k], pts[l]


def _nc_blocks(points: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    # the block of the first point splits the rest into independent gaps
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for size in range(len(rest) + 1):
        for chosen in _subsets(rest, size):
            block = (first,) + chosen
            cuts = [points.index(p) for p in block] + [len(points)]
            gaps = [points[cuts[i] + 1:cuts[i + 1]] for i in range(len(block))]
            yield from _combine(block, gaps)


def _combine(block, gaps):
    if not gaps:
        yield [block]
        return
    for head in _nc_blocks(gaps[0]):
        for tail in _combine(block, gaps[1:]):
            yield head + tail


def _subsets(items, size):
    if size == 0:
        yield ()
        return
    for i in range(len(items) - size + 1):
        for rest in _subsets(items[i + 1:], size - 1):
            yield (items[i],) + rest


def enumerate_nc(m: int) -> list[NCPartition]:
    """All non-crossing partitions of {1..m}, 1 <= m <= 10."""
    if not 1 <= m <= MAX_GROUND_SET:
        raise SizeLimitExceeded(f"ground set size {m} outside 1..{MAX_GROUND_SET}")
    out = []
    for blocks in _nc_blocks(tuple(range(1, m + 1))):
        out.append(NCPartition(m, tuple(sorted(blocks))))
    return out


@dataclass(frozen=True, eq=False)
class ColoredWord:
    """Letters a_1..a_m with spacers s_1..s_{m-1} between them."""

    colors: tuple[Color, ...]
    spacers: tuple[AlgebraElement, ...]

    def __post_init__(self):
        if len(self.spacers) != len(self.colors) - 1:
            raise ValueError("need exactly one spacer between consecutive letters")

    @property
    def m(self) -> int:
        return len(self.colors)


def _cumulant(c: MultiSeries, args: list[AlgebraElement]) -> AlgebraElement:
    # kappa(x s_1, ..., x s_n, x) = C_n(s_1..s_n), by direct basis expansion
    ctx = c.ctx
    n = len(args)
    coeffs = c.coeffs[n].reshape((ctx.D,) * (n + 1))
    vec = coeffs
    for b in reversed(args):
        vec = vec @ b.coefficients
    return ctx.from_coefficients(vec)


def evaluate_partition(pi: NCPartition, word: ColoredWord, c_x: MultiSeries,
                       c_y: MultiSeries | None = None,
                       rule: Literal["leftmost", "rightmost"] = "leftmost") -> AlgebraElement:
    """Nested cumulant evaluation of one partition on a colored word.

    An interval block (consecutive among the letters still present) is
    replaced by its cumulant value, which is absorbed into the neighboring
    spacers; this repeats until no letters are left.
    """
    ctx = c_x.ctx
    if pi.m != word.m:
        raise ValueError("partition and word sizes differ")
    series = {"X": c_x, "Y": c_y}
    for blk in pi.blocks:
        if len({word.colors[i - 1] for i in blk}) > 1:
            return ctx.zero()

    letters = list(range(1, word.m + 1))
    # spacer[k] sits between letters[k] and letters[k+1]
    spacer = list(word.spacers)
    prefix, suffix = ctx.unit(), ctx.unit()
    blocks = [list(b) for b in pi.blocks]

    while letters:
        pos = {p: k for k, p in enumerate(letters)}
        intervals = [b for b in blocks if pos[b[-1]] - pos[b[0]] == len(b) - 1]
        blk = min(intervals, key=lambda b: pos[b[0]]) if rule == "leftmost" \
            else max(intervals, key=lambda b: pos[b[0]])
        i, j = pos[blk[0]], pos[blk[-1]]
        c = series[word.colors[blk[0] - 1]]
        kappa = _cumulant(c, spacer[i:j])
        left = i > 0
        right = j < len(letters) - 1
        if left and right:
            merged = spacer[i - 1] * kappa * spacer[j]
            spacer[i - 1:j + 1] = [merged]
        elif left:
            suffix = spacer[i - 1] * kappa * suffix
            del spacer[i - 1:j]
        elif right:
            prefix = prefix * kappa * spacer[j]
            del spacer[i:j + 1]
        else:
            prefix = prefix * kappa * suffix
            suffix = ctx.unit()
        del letters[i:j + 1]
        blocks.remove(blk)
    return prefix * suffix


def _size_guard(m: int) -> None:
    if m > MAX_GROUND_SET:
        raise SizeLimitExceeded(f"word length {m} exceeds {MAX_GROUND_SET}")


def _assemble(ctx: AlgebraContext, n: int, moment) -> MultilinearMap:
    D = ctx.D
    coeffs = np.zeros((D, D ** n), dtype=complex)
    for flat, idx in enumerate(product(range(D), repeat=n)):
        coeffs[:, flat] = moment([ctx.basis[i] for i in idx]).coefficients
    return MultilinearMap(ctx, n, coeffs)


def oracle_moments(c: MultiSeries, n: int,
                   rule: Literal["leftmost", "rightmost"] = "leftmost") -> MultilinearMap:
    """E[x b_1 x ... b_n x] as an n-linear map, by summing over NC(n + 1)."""
    _size_guard(n + 1)
    parts = enumerate_nc(n + 1)
    colors = ("X",) * (n + 1)

    def moment(bs):
        word = ColoredWord(colors, tuple(bs))
        total = c.ctx.zero()
        for pi in parts:
            total = total + evaluate_partition(pi, word, c, rule=rule)
        return total

    return _assemble(c.ctx, n, moment)


def product_moments(c_x: MultiSeries, c_y: MultiSeries, n: int) -> MultilinearMap:
    """E[xy b_1 xy ... b_n xy] with vanishing mixed cumulants, by brute force."""
    m = 2 * (n + 1)
    _size_guard(m)
    ctx = c_x.ctx
    colors = ("X", "Y") * (n + 1)
    parts = [pi for pi in enumerate_nc(m)
             if all(len({colors[i - 1] for i in b}) == 1 for b in pi.blocks)]

    def moment(bs):
        spacers = []
        for k in range(n + 1):
            spacers.append(ctx.unit())
            if k < n:
                spacers.append(bs[k])
        word = ColoredWord(colors, tuple(spacers))
        total = ctx.zero()
        for pi in parts:
            total = total + evaluate_partition(pi, word, c_x, c_y)
        return total

    return _assemble(ctx, n, moment)

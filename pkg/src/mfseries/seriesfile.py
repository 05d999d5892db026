"""JSON file format for truncated series.

    {
      "dim": d,
      "order": N,
      "kind": "moments" | "cumulants" | "s-transform" | "generic",
      "series": [deg_0, deg_1, ..., deg_N]
    }

``deg_n`` is a nested array of D rows (D = d*d) by D**n columns; row o,
column flat(i_1..i_n) holds the o-th matrix-unit coordinate of
F_n(e_{i_1}, ..., e_{i_n}), the argument multi-index flattened row-major and
matrix units numbered i*d + j.  Each complex entry is a ``[re, im]`` pair.
Floats are written with Python's shortest round-trip repr, so parse/serialize
reproduces every value exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import AlgebraContext
from .mfs import MultiSeries

__all__ = ["KINDS", "SeriesFile", "SeriesFileError", "load", "dump", "loads", "dumps"]

KINDS = ("moments", "cumulants", "s-transform", "generic")


class SeriesFileError(ValueError):
    """The file is malformed or inconsistent with its declared shape."""


@dataclass(frozen=True, eq=False)
class SeriesFile:
    dim: int
    order: int
    kind: str
    series: MultiSeries

    @classmethod
    def wrap(cls, series: MultiSeries, kind: str = "generic") -> SeriesFile:
        return cls(series.ctx.d, series.order, kind, series)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "order": self.order,
            "kind": self.kind,
            "series": [np.stack([c.real, c.imag], axis=-1).tolist() for c in self.series.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict, tol: float | None = None) -> SeriesFile:
        try:
            dim, order, kind, raw = data["dim"], data["order"], data["kind"], data["series"]
        except (KeyError, TypeError) as exc:
            raise SeriesFileError(f"missing field: {exc}") from None
        if not isinstance(dim, int) or dim < 1:
            raise SeriesFileError(f"bad dim {dim!r}")
        if not isinstance(order, int) or order < 0:
            raise SeriesFileError(f"bad order {order!r}")
        if kind not in KINDS:
            raise SeriesFileError(f"unknown kind {kind!r}; expected one of {KINDS}")
        if not isinstance(raw, list) or len(raw) != order + 1:
            raise SeriesFileError(f"expected {order + 1} degree entries")
        D = dim * dim
        coeffs = []
        for n, entry in enumerate(raw):
            try:
                arr = np.asarray(entry, dtype=float)
            except (TypeError, ValueError) as exc:
                raise SeriesFileError(f"degree {n}: {exc}") from None
            if arr.shape != (D, D ** n, 2):
                raise SeriesFileError(f"degree {n}: shape {arr.shape[:-1]} != {(D, D ** n)}")
            coeffs.append(arr[..., 0] + 1j * arr[..., 1])
        ctx = AlgebraContext(dim) if tol is None else AlgebraContext(dim, tol)
        return cls(dim, order, kind, MultiSeries(ctx, coeffs))


def dumps(sf: SeriesFile) -> str:
    return json.dumps(sf.to_dict())


def loads(text: str, tol: float | None = None) -> SeriesFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SeriesFileError(f"invalid JSON: {exc}") from None
    return SeriesFile.from_dict(data, tol)


def dump(sf: SeriesFile, path: str | Path) -> None:
    Path(path).write_text(dumps(sf) + "\n")


def load(path: str | Path, tol: float | None = None) -> SeriesFile:
    return loads(Path(path).read_text(), tol)

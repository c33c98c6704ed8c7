"""Grid functions: real values attached to the points of a time scale."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nablafrac.errors import EvalError, MaskedInput, NablaError, ScaleMismatch
from nablafrac.expr import Expression, evaluate, parse_expression
from nablafrac.timescale import TimeScale, explicit


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values aligned one-to-one with ``scale.points``.

    ``mask`` is ``None`` for ordinary functions. A masked function carries a
    boolean validity flag per point; invalid values are NaN. Operators refuse
    masked input unless the caller explicitly strips the invalid points.
    """

    scale: TimeScale
    values: np.ndarray
    mask: np.ndarray | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.scale.points.shape:
            raise NablaError(
                f"{vals.size} values given for a scale of {len(self.scale)} points"
            )
        if self.mask is None:
            if not np.all(np.isfinite(vals)):
                raise NablaError("grid function values must be finite")
        else:
            mask = np.array(self.mask, dtype=bool)
            if mask.shape != vals.shape:
                raise NablaError("mask shape does not match values")
            vals = np.where(mask, vals, np.nan)
            if not np.all(np.isfinite(vals[mask])):
                raise NablaError("valid grid function values must be finite")
            mask.setflags(write=False)
            object.__setattr__(self, "mask", mask)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def is_masked(self) -> bool:
        return self.mask is not None and not bool(np.all(self.mask))

    def at(self, t: float) -> float:
        return float(self.values[self.scale.index(t)])

    def require_unmasked(self) -> None:
        if self.is_masked:
            bad = self.scale.points[~self.mask]
            raise MaskedInput(f"function is undefined at t={float(bad[0])!r}")

    def restrict(self, start: int) -> GridFunction:
        """Restriction to ``scale.points[start:]``."""
        mask = None if self.mask is None else self.mask[start:]
        return GridFunction(self.scale.tail(start), self.values[start:], mask)


def sample(e: Expression | str, ts: TimeScale, masked: bool = False) -> GridFunction:
    """Evaluate ``e`` at every point of ``ts``.

    With ``masked=True`` poles become invalid points instead of raising
    :class:`EvalError`.
    """
    if isinstance(e, str):
        e = parse_expression(e)
    if not masked:
        return GridFunction(ts, evaluate(e, ts.points))
    values = np.empty(len(ts))
    valid = np.ones(len(ts), dtype=bool)
    for i, t in enumerate(ts.points):
        try:
            values[i] = evaluate(e, np.array([t]))[0]
        except EvalError:
            values[i] = np.nan
            valid[i] = False
    return GridFunction(ts, values, valid)


def same_scale(f: GridFunction, g: GridFunction) -> None:
    if f.scale is not g.scale and f.scale != g.scale:
        raise ScaleMismatch(f"functions live on different scales ({f.scale.label} vs {g.scale.label})")


def lincomb(a: float, f: GridFunction, b: float, g: GridFunction) -> GridFunction:
    """Pointwise ``a*f + b*g``."""
    same_scale(f, g)
    f.require_unmasked()
    g.require_unmasked()
    return GridFunction(f.scale, a * f.values + b * g.values)


# -- CSV ---------------------------------------------------------------------

def format_number(x: float) -> str:
    """17 significant digits: enough for a bit-exact round trip."""
    return "%.17g" % x


def to_csv(f: GridFunction) -> str:
    buf = io.StringIO()
    buf.write("t,value\n")
    for t, v in zip(f.scale.points, f.values):
        buf.write(f"{format_number(t)},{format_number(v)}\n")
    return buf.getvalue()


def read_csv(path: str | Path, scale: TimeScale | None = None, atol: float = 1e-9) -> GridFunction:
    """Load a ``t,value`` CSV.

    Without ``scale`` the file's own ``t`` column defines an explicit scale.
    Otherwise every scale point must appear, in order, within ``atol``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
        raise NablaError(f"{path}: expected header 't,value'")
    ts, vs = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != 2:
            raise NablaError(f"{path}:{lineno}: expected 2 columns")
        try:
            ts.append(float(row[0]))
            vs.append(float(row[1]))
        except ValueError:
            raise NablaError(f"{path}:{lineno}: not a number") from None
    if scale is None:
        return GridFunction(explicit(ts), np.array(vs))
    if len(ts) != len(scale) or np.any(np.abs(np.array(ts) - scale.points) > atol):
        raise ScaleMismatch(f"{path}: t column does not match scale {scale.label}")
    return GridFunction(scale, np.array(vs))

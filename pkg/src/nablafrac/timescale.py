"""Finite time scales: ordered point sets with jump operators and graininess.

A :class:`TimeScale` stands in for a closed subset of the reals. Continuous
intervals are represented by uniform samples (``real_sample``) and their
left-dense behaviour is only reached as a refinement limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from nablafrac.errors import DegenerateScale, NablaError, OutsideKappaDomain, PointNotInScale

#: absolute tolerance used when mapping user supplied numbers onto scale points
LOOKUP_ATOL = 1e-9

FAMILIES = ("explicit", "integer_range", "uniform_step", "real_sample")


@dataclass(frozen=True)
class PointClass:
    left: str
    right: str


@dataclass(frozen=True, eq=False)
class TimeScale:
    """Strictly ascending finite point set.

    ``family`` is one of :data:`FAMILIES`; ``step`` is the nominal spacing for
    the uniform families and ``None`` otherwise. ``label`` is a human readable
    descriptor used in reports.
    """

    points: np.ndarray
    family: str = "explicit"
    step: float | None = None
    label: str = ""
    derived: bool = False
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1:
            raise NablaError("time scale points must be one-dimensional")
        if pts.size < (1 if self.derived else 2):
            raise DegenerateScale("a time scale needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise NablaError("time scale points must be finite")
        gaps = np.diff(pts)
        if np.any(gaps <= 0):
            bad = int(np.argmax(gaps <= 0))
            raise NablaError(
                f"points must be strictly ascending; violation between "
                f"{pts[bad]!r} and {pts[bad + 1]!r}"
            )
        if self.family not in FAMILIES:
            raise NablaError(f"unknown scale family {self.family!r}")
        if self.family == "uniform_step":
            if self.step is None or self.step <= 0:
                raise NablaError("uniform_step scales need a positive step")
            if np.any(np.abs(gaps - self.step) > 1e-12 * self.step):
                raise NablaError(f"points are not uniformly spaced by h={self.step!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", {float(p): i for i, p in enumerate(pts)})
        if not self.label:
            object.__setattr__(self, "label", f"explicit[{pts.size} points]")

    def __len__(self) -> int:
        return int(self.points.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeScale):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.all(self.points == other.points))

    def __hash__(self) -> int:
        return hash(self.points.tobytes())

    @property
    def min(self) -> float:
        return float(self.points[0])

    @property
    def max(self) -> float:
        return float(self.points[-1])

    def index(self, t: float) -> int:
        """Exact membership lookup."""
        try:
            return self._index[float(t)]
        except (KeyError, TypeError, ValueError):
            raise PointNotInScale(t) from None

    def locate(self, t: float, atol: float = LOOKUP_ATOL) -> int:
        """Index of the scale point within ``atol`` of ``t``."""
        i = int(np.searchsorted(self.points, t))
        best = None
        for j in (i - 1, i):
            if 0 <= j < len(self) and abs(self.points[j] - t) <= atol:
                if best is None or abs(self.points[j] - t) < abs(self.points[best] - t):
                    best = j
        if best is None:
            raise PointNotInScale(t)
        return best

    def graininess(self) -> np.ndarray:
        """``nu`` at every point of the kappa domain, i.e. ``points[1:] - points[:-1]``."""
        return self.points[1:] - self.points[:-1]

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        gaps = self.graininess()
        return bool(np.all(np.abs(gaps - gaps[0]) <= rtol * gaps[0]))

    def tail(self, start: int) -> TimeScale:
        """Sub-scale made of ``points[start:]``."""
        if start == 0:
            return self
        if len(self) - start < 1:
            raise DegenerateScale(f"no points remain after dropping {start}")
        return TimeScale(
            self.points[start:],
            family=self.family,
            step=self.step,
            label=f"{self.label}[{start}:]",
            derived=self.derived or len(self) - start < 2,
        )

    def rho_points(self) -> np.ndarray:
        """``rho`` evaluated at every point (the minimum maps to itself)."""
        return np.concatenate([self.points[:1], self.points[:-1]])


def explicit(points) -> TimeScale:
    pts = [float(p) for p in points]
    return TimeScale(np.array(pts), family="explicit", label="{" + ", ".join(f"{p:g}" for p in pts) + "}")


def integer_range(a: int, b: int) -> TimeScale:
    """The integers ``a, a+1, ..., b``."""
    if int(a) != a or int(b) != b:
        raise NablaError("integer_range bounds must be integers")
    return TimeScale(np.arange(int(a), int(b) + 1, dtype=float), family="integer_range", step=1.0, label=f"Z[{int(a)}..{int(b)}]")


def uniform_step(h: float, a: float, b: float) -> TimeScale:
    """Points ``a + i*h`` for ``i = 0..n`` with ``n = round((b - a)/h)``."""
    if h <= 0:
        raise NablaError("step must be positive")
    n = (b - a) / h
    if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
        raise NablaError(f"interval [{a!r}, {b!r}] is not a whole number of steps of {h!r}")
    pts = a + h * np.arange(int(round(n)) + 1, dtype=float)
    return TimeScale(pts, family="uniform_step", step=float(h), label=f"{h:g}Z[{a:g}..{b:g}]")


def real_sample(a: float, b: float, n: int) -> TimeScale:
    """``n`` equal subintervals of ``[a, b]`` (``n + 1`` points, endpoints exact)."""
    if int(n) != n or n < 1:
        raise NablaError("sample count must be a positive integer")
    if not b > a:
        raise NablaError("sample interval must satisfy a < b")
    pts = np.linspace(a, b, int(n) + 1)
    return TimeScale(pts, family="real_sample", step=(b - a) / n, label=f"R[{a:g},{b:g}]/{int(n)}")


def read_scale_file(path: str | Path) -> TimeScale:
    pts = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            pts.append(float(line))
        except ValueError:
            raise NablaError(f"{path}:{lineno}: not a number: {line!r}") from None
    ts = explicit(pts)
    return TimeScale(ts.points, family="explicit", label=f"file:{path}")


def parse_scale_spec(spec: str) -> TimeScale:
    """Build a scale from a spec string.

    Accepted forms: ``integers:a:b``, ``step:h:a:b``, ``sample:a:b:N``,
    ``file:PATH`` and ``points:x0,x1,...``.
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "file":
            return read_scale_file(rest)
        if kind == "points":
            return explicit(float(x) for x in rest.split(","))
        parts = rest.split(":")
        if kind == "integers" and len(parts) == 2:
            return integer_range(int(parts[0]), int(parts[1]))
        if kind == "step" and len(parts) == 3:
            return uniform_step(float(parts[0]), float(parts[1]), float(parts[2]))
        if kind == "sample" and len(parts) == 3:
            return real_sample(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        if isinstance(exc, NablaError):
            raise
        raise NablaError(f"bad scale spec {spec!r}: {exc}") from None
    raise NablaError(f"bad scale spec {spec!r}")


def rho(ts: TimeScale, t: float) -> float:
    """Backward jump: the largest point below ``t``, or ``t`` at the minimum."""
    i = ts.index(t)
    return float(ts.points[max(i - 1, 0)])


def sigma(ts: TimeScale, t: float) -> float:
    """Forward jump: the smallest point above ``t``, or ``t`` at the maximum."""
    i = ts.index(t)
    return float(ts.points[min(i + 1, len(ts) - 1)])


def nu(ts: TimeScale, t: float) -> float:
    """Backward graininess ``t - rho(t)``, defined on the kappa domain."""
    i = ts.index(t)
    if i == 0:
        raise OutsideKappaDomain(t)
    return float(ts.points[i] - ts.points[i - 1])


def kappa_domain(ts: TimeScale) -> TimeScale:
    """Remove the (left-scattered) minimum.

    The result may hold a single point (``{0, 1} -> {1}``); such derived
    domains can carry derivative values but have no kappa domain of their own.
    """
    if len(ts) < 2:
        raise DegenerateScale(f"kappa domain of {ts.label} would be empty")
    label = f"kappa({ts.label})"
    if ts.family == "integer_range":
        label = f"Z[{ts.min + 1:g}..{ts.max:g}]"
    return TimeScale(ts.points[1:], family=ts.family, step=ts.step, label=label, derived=True)


def point_class(ts: TimeScale, t: float) -> PointClass:
    """Classification of ``t``; dense tags only record the limiting intent of sampled intervals."""
    i = ts.index(t)
    if ts.family != "real_sample":
        return PointClass("scattered", "scattered")
    left = "scattered" if i == 0 else "dense"
    right = "scattered" if i == len(ts) - 1 else "dense"
    return PointClass(left, right)


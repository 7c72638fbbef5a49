"""Sampled 1-D signals on uniform grids, Jordan decomposition and warping."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, NonMonotoneWarp, ZeroMass
from .warp import WarpModel


@dataclass(frozen=True)
class Grid:
    """Uniform sampling lattice ``t_min, t_min + dt, ..., t_max`` with ``n`` points."""

    t_min: float
    t_max: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "t_min", float(self.t_min))
        object.__setattr__(self, "t_max", float(self.t_max))
        if int(self.n) != self.n:
            raise ValueError(f"grid size must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (np.isfinite(self.t_min) and np.isfinite(self.t_max)):
            raise ValueError("grid bounds must be finite")
        if not self.t_min < self.t_max:
            raise ValueError(f"need t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if self.n < 2:
            raise ValueError(f"need at least 2 samples, got {self.n}")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n)

    def to_dict(self) -> dict:
        return {"t_min": self.t_min, "t_max": self.t_max, "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> Grid:
        return cls(d["t_min"], d["t_max"], d["n"])


@dataclass(frozen=True, eq=False)
class Signal:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def mass(self) -> float:
        """Riemann-sum L1 norm ``sum |s_k| * dt``."""
        return l1_norm(self)

    def __neg__(self) -> Signal:
        return Signal(self.grid, -self.values)

    def __mul__(self, c: float) -> Signal:
        return Signal(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __add__(self, other: Signal) -> Signal:
        _same_grid(self, other)
        return Signal(self.grid, self.values + other.values)

    def __sub__(self, other: Signal) -> Signal:
        _same_grid(self, other)
        return Signal(self.grid, self.values - other.values)

    def __call__(self, x) -> np.ndarray:
        """Linear interpolation, zero outside the grid."""
        return np.interp(x, self.grid.t, self.values, left=0.0, right=0.0)


def _same_grid(a: Signal, b: Signal):
    if a.grid != b.grid:
        raise ValueError("signals live on different grids")


@dataclass(frozen=True)
class JordanPair:
    pos: Signal
    neg: Signal
    pos_mass: float
    neg_mass: float


def l1_norm(s: Signal) -> float:
    return float(np.sum(np.abs(s.values)) * s.grid.dt)


def jordan_decompose(s: Signal) -> JordanPair:
    """Split ``s`` into nonnegative parts with ``s = pos - neg`` and disjoint supports."""
    pos = Signal(s.grid, np.maximum(s.values, 0.0))
    neg = Signal(s.grid, np.maximum(-s.values, 0.0))
    return JordanPair(pos, neg, l1_norm(pos), l1_norm(neg))


def normalize_l1(s: Signal) -> Signal:
    m = l1_norm(s)
    if m == 0:
        raise ZeroMass("cannot normalize a signal with zero L1 mass")
    return Signal(s.grid, s.values / m)


# generators ----------------------------------------------------------------

GABOR_CENTER = 0.5
GABOR_FREQ = 40 * np.pi
GABOR_WIDTH = 120.0


def gabor(grid: Grid, center: float = GABOR_CENTER, freq: float = GABOR_FREQ,
          width: float = GABOR_WIDTH) -> Signal:
    """Gabor atom ``cos(freq (t - center)) exp(-width (t - center)**2)``.

    The defaults give the test signal ``cos(40 pi (t - 0.5)) exp(-120 (t - 0.5)**2)``.
    """
    if width <= 0:
        raise ValueError("gabor width must be positive")
    u = grid.t - center
    return Signal(grid, np.cos(freq * u) * np.exp(-width * u * u))


def gaussian(grid: Grid, center: float, sigma: float, amplitude: float = 1.0) -> Signal:
    u = (grid.t - center) / sigma
    return Signal(grid, amplitude * np.exp(-0.5 * u * u))


def uniform(grid: Grid, a: float | None = None, b: float | None = None) -> Signal:
    """Unit-mass indicator of ``[a, b]`` (default: the whole grid) under the dt convention."""
    t = grid.t
    a = grid.t_min if a is None else a
    b = grid.t_max if b is None else b
    eps = 1e-9 * grid.dt
    v = ((t >= a - eps) & (t <= b + eps)).astype(float)
    if not v.any():
        raise ZeroMass(f"interval [{a}, {b}] contains no grid points")
    return normalize_l1(Signal(grid, v))


GENERATORS: dict[str, Callable[..., Signal]] = {
    "gabor": gabor,
    "gaussian": gaussian,
    "uniform": uniform,
}


# warping -------------------------------------------------------------------

def interpolate(s: Signal, x, kind: str = "cubic") -> np.ndarray:
    """Evaluate ``s`` between samples; zero outside its grid."""
    x = np.asarray(x, dtype=float)
    if kind == "linear":
        return s(x)
    if kind != "cubic":
        raise ValueError(f"unknown interpolation kind {kind!r}")
    inside = (x >= s.grid.t_min) & (x <= s.grid.t_max)
    out = np.zeros_like(x)
    out[inside] = CubicSpline(s.grid.t, s.values)(x[inside])
    return out


def _derivative(g, t: np.ndarray, h: float) -> np.ndarray:
    if hasattr(g, "derivative"):
        return np.asarray(g.derivative(t), dtype=float)
    return (np.asarray(g(t + h)) - np.asarray(g(t - h))) / (2 * h)


def apply_warp(s: Signal, g: WarpModel | Callable, out_grid: Grid | None = None,
               kind: str = "cubic") -> Signal:
    """Sample the warped signal ``g'(t) s(g(t))`` on ``out_grid``.

    ``s`` is interpolated at ``g(t_k)`` (cubic spline by default,
    ``kind="linear"`` for straight lines between samples) and taken as zero
    outside its grid. ``g`` may be a :class:`WarpModel` or any vectorized
    callable; callables without a ``derivative`` method get centered
    differences.
    """
    out_grid = s.grid if out_grid is None else out_grid
    t = out_grid.t
    try:
        gt = np.asarray(g(t), dtype=float)
        dg = _derivative(g, t, 1e-3 * out_grid.dt)
    except DomainError as exc:
        raise NonMonotoneWarp(f"warp undefined on the output grid: {exc}") from exc
    if not np.all(np.isfinite(gt)) or not np.all(np.isfinite(dg)):
        raise NonMonotoneWarp("warp is not finite on the output grid")
    if np.any(dg <= 0):
        bad = t[dg <= 0]
        raise NonMonotoneWarp(
            f"g' <= 0 at {bad.size} sample(s), first at t = {bad[0]!r}")
    return Signal(out_grid, dg * interpolate(s, gt, kind))


_TAIL = 1e-16


def support(s: Signal, tol: float = 1e-9) -> tuple[float, float]:
    """Interval holding all but a ``tol`` fraction of |s| mass at each end."""
    c = np.cumsum(np.abs(s.values))
    if c[-1] == 0:
        raise ZeroMass("signal is identically zero")
    c /= c[-1]
    t = s.grid.t
    lo = np.searchsorted(c, tol, side="right")
    hi = np.searchsorted(c, 1 - tol, side="left")
    return float(t[max(lo - 1, 0)]), float(t[min(hi + 1, s.grid.n - 1)])


def covering_grid(s: Signal, g: WarpModel, n: int | None = None, tol: float = 1e-9) -> Grid:
    """Grid on which the warp of ``s`` by ``g`` is fully observed.

    The right end is ``g^{-1}(s.grid.t_max)`` so both signals share the same
    terminal sample. The left end is ``g^{-1}(s.grid.t_min)`` when that lies
    on the same increasing branch, and otherwise the preimage of the left
    edge of the support of ``s`` (tails at double-precision level dropped).
    If the branch cannot reach that far, the grid starts just inside the
    branch, provided the unreachable fraction of |s| mass is at most ``tol``.
    """
    n = s.grid.n if n is None else n
    t0, t1 = s.grid.t_min, s.grid.t_max
    branch = None
    for lo, hi in reversed(g.increasing_branches()):
        if g.limit(lo) < t1 <= g.limit(hi):
            branch = (lo, hi)
            break
    if branch is None:
        raise NonMonotoneWarp("no increasing branch of g reaches the template grid's right end")
    hi = float(g.inverse(t1, bracket=branch))
    glo = g.limit(branch[0])
    if glo < t0:
        left = t0
    else:
        left = support(s, _TAIL)[0]
        if left <= glo:
            c = np.cumsum(np.abs(s.values))
            lost = np.interp(glo, s.grid.t, c) / c[-1]
            if lost > tol:
                raise NonMonotoneWarp(
                    f"g is increasing only above g = {glo}, leaving a {lost:.3g} fraction "
                    f"of the template's mass unobservable")
            left = glo + s.grid.dt
    lo = float(g.inverse(left, bracket=branch))
    if np.isfinite(branch[0]) and lo <= branch[0]:
        lo = np.nextafter(branch[0], np.inf)
    return Grid(lo, hi, n)


# CSV -----------------------------------------------------------------------

def read_signal_csv(path: str | Path, rtol: float = 1e-9) -> Signal:
    """Read a ``t,value`` CSV, checking the time column is a uniform grid."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["t", "value"]:
            raise ValueError(f"{path}: expected header 't,value', got {','.join(header)!r}")
        rows = [(float(a), float(b)) for a, b in reader]
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 samples")
    t, v = np.array(rows).T
    grid = Grid(t[0], t[-1], len(t))
    if np.any(np.diff(t) <= 0):
        raise ValueError(f"{path}: t must be strictly increasing")
    span = grid.t_max - grid.t_min
    if np.max(np.abs(t - grid.t)) > rtol * max(span, abs(grid.t_max), abs(grid.t_min)):
        raise ValueError(f"{path}: t is not uniformly spaced")
    return Signal(grid, v)


def write_signal_csv(s: Signal, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(s.t, s.values):
            w.writerow([repr(float(t)), repr(float(v))])

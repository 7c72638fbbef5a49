"""Cumulations, generalized inverses, the CDT and the signed CDT.

Two discretizations are available through ``method``:

``"riemann"``
    Prefix sums ``F[k] = sum_{j<=k} s_j dt`` with a sample-level generalized
    inverse refined by linear interpolation. Cheap, first order.
``"spline"`` (default)
    The signed signal is interpolated by a cubic spline, each Jordan part is
    ``max(0, +-spline)`` integrated exactly (zero crossings included), and
    the generalized inverse is solved inside the bracketing interval. Level
    errors are fourth order, which keeps quantile maps stable where a part
    has gaps and its quantile function jumps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateMap, DomainError, NotADensity
from .signal import Grid, Signal, jordan_decompose, normalize_l1, uniform

METHODS = ("spline", "riemann")
DENSITY_TOL = 1e-9
# Parts with mass below this fraction of the total are treated as zero.
TRIVIAL_MASS = 1e-12
# Levels this close (relative) to the total mass fall into inf(empty set).
TOP_LEVEL_RTOL = 1e-12
_BISECT_ITERS = 60


@dataclass(frozen=True, eq=False)
class Cumulation:
    grid: Grid
    values: np.ndarray


def cumulate(s: Signal) -> Cumulation:
    """Prefix sums ``F[k] = sum_{j<=k} s_j dt``."""
    return Cumulation(s.grid, np.cumsum(s.values) * s.grid.dt)


def generalized_inverse(F: Cumulation, y, top_rtol: float = 0.0):
    """``inf{x : F(x) > y}`` on the sample grid, refined linearly.

    Finds the first sample whose cumulation strictly exceeds ``y`` and
    interpolates on the segment rising into it, so a flat stretch of ``F``
    at level ``y`` resolves to its right edge. Levels at or above the final
    value (``inf`` of the empty set) return ``t_max``; ``top_rtol`` widens
    that band to absorb rounding in the total mass.
    """
    Fv = F.values
    t = F.grid.t
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)

    k = np.searchsorted(Fv, y, side="right")
    out = np.empty_like(y)
    top = (k >= Fv.size) | (y >= Fv[-1] - top_rtol * abs(Fv[-1]))
    first = (k == 0) & ~top
    mid = ~top & ~first
    out[top] = F.grid.t_max
    out[first] = t[0]
    km = k[mid]
    f0, f1 = Fv[km - 1], Fv[km]
    out[mid] = t[km - 1] + (y[mid] - f0) / (f1 - f0) * F.grid.dt
    return float(out[0]) if scalar else out


class SplineCumulation:
    """Exact running integral of ``max(0, sign * S)`` for a cubic spline ``S``.

    Only grid cells with at least one sample of the requested sign
    contribute, so spline ringing next to exact zeros adds no mass.
    """

    def __init__(self, s: Signal, sign: int = 1):
        t = s.grid.t
        v = sign * s.values
        self.grid = s.grid
        spline = CubicSpline(t, v)
        self._anti = spline.antiderivative()
        roots = spline.roots(extrapolate=False)
        roots = roots[(roots > t[0]) & (roots < t[-1])]
        B = np.union1d(t, roots)
        mid = 0.5 * (B[1:] + B[:-1])
        cell = np.clip(np.searchsorted(t, mid) - 1, 0, t.size - 2)
        active = (spline(mid) > 0) & ((v[cell] > 0) | (v[cell + 1] > 0))
        A = self._anti(B)
        inc = np.where(active, np.maximum(np.diff(A), 0.0), 0.0)
        self.breaks = B
        self.values = np.concatenate([[0.0], np.cumsum(inc)])
        self._A = A

    @property
    def total(self) -> float:
        return float(self.values[-1])

    def at_grid(self) -> np.ndarray:
        idx = np.searchsorted(self.breaks, self.grid.t)
        return self.values[idx]

    def inverse(self, y) -> np.ndarray:
        """``inf{x : F(x) > y}``; levels at or above the total give ``t_max``."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        C, B = self.values, self.breaks
        k = np.searchsorted(C, y, side="right")
        out = np.empty_like(y)
        top = (k >= C.size) | (y >= C[-1] * (1 - TOP_LEVEL_RTOL))
        first = (k == 0) & ~top
        mid = ~top & ~first
        out[top] = self.grid.t_max
        out[first] = B[0]
        km = k[mid]
        lo, hi = B[km - 1], B[km]
        base = self._A[km - 1]
        target = y[mid] - C[km - 1]
        for _ in range(_BISECT_ITERS):
            m = 0.5 * (lo + hi)
            below = self._anti(m) - base <= target
            lo = np.where(below, m, lo)
            hi = np.where(below, hi, m)
        out[mid] = 0.5 * (lo + hi)
        return out


def _check_density(s: Signal, name: str):
    if np.any(s.values < 0):
        raise NotADensity(f"{name} has negative samples")
    m = float(np.sum(s.values) * s.grid.dt)
    if abs(m - 1.0) > DENSITY_TOL:
        raise NotADensity(f"{name} has mass {m!r}, expected 1")


def _check_method(method: str):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def reference_levels(s0: Signal, method: str = "spline") -> np.ndarray:
    """Cumulation of the reference at its own grid points, as fractions of its mass."""
    _check_method(method)
    if method == "riemann":
        return cumulate(s0).values
    F = SplineCumulation(s0)
    return F.at_grid() / F.total


def _quantiles(s: Signal, sign: int, levels: np.ndarray, method: str) -> np.ndarray:
    if method == "riemann":
        part = Signal(s.grid, np.maximum(sign * s.values, 0.0))
        return generalized_inverse(cumulate(normalize_l1(part)), levels,
                                   top_rtol=TOP_LEVEL_RTOL)
    F = SplineCumulation(s, sign)
    if F.total <= 0:
        raise DegenerateMap("part has no mass under spline integration")
    return F.inverse(levels * F.total)


def cdt(s: Signal, s0: Signal, method: str = "spline") -> np.ndarray:
    """Transport map ``F_s^dagger o F_s0`` sampled on the reference grid.

    Both ``s`` and ``s0`` must be nonnegative with unit mass; nothing is
    rescaled silently.
    """
    _check_method(method)
    _check_density(s, "signal")
    _check_density(s0, "reference")
    return _quantiles(s, 1, reference_levels(s0, method), method)


def part_maps(s: Signal, s0: Signal, method: str = "spline"):
    """Transport maps and masses of both Jordan parts of ``s``.

    Returns ``(pos_map, pos_mass, neg_map, neg_mass)`` with all-zero maps
    for trivial parts.
    """
    _check_method(method)
    _check_density(s0, "reference")
    jp = jordan_decompose(s)
    total = jp.pos_mass + jp.neg_mass
    levels = reference_levels(s0, method)
    out = []
    for sign, mass in ((1, jp.pos_mass), (-1, jp.neg_mass)):
        if mass == 0 or mass <= TRIVIAL_MASS * total:
            out += [np.zeros(s0.grid.n), 0.0]
        else:
            out += [_quantiles(s, sign, levels, method), mass]
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Scdt:
    """Signed CDT: positive map and mass, negative map and mass.

    Maps are sampled on ``reference`` (the grid of the reference density);
    their values are times on the transformed signal's axis. A part with
    zero mass has an all-zero map.
    """

    pos_map: np.ndarray
    pos_mass: float
    neg_map: np.ndarray
    neg_mass: float
    reference: Grid
    reference_kind: str = "custom"
    method: str = "spline"

    def __post_init__(self):
        for name in ("pos_map", "neg_map"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (self.reference.n,):
                raise ValueError(f"{name} must have {self.reference.n} samples")
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        object.__setattr__(self, "pos_mass", float(self.pos_mass))
        object.__setattr__(self, "neg_mass", float(self.neg_mass))
        if self.pos_mass < 0 or self.neg_mass < 0:
            raise ValueError("part masses must be nonnegative")
        _check_method(self.method)

    @property
    def pos_trivial(self) -> bool:
        return self.pos_mass == 0

    @property
    def neg_trivial(self) -> bool:
        return self.neg_mass == 0

    def parts(self):
        """Yield ``(map, mass)`` for the nontrivial parts, positive first."""
        if not self.pos_trivial:
            yield self.pos_map, self.pos_mass
        if not self.neg_trivial:
            yield self.neg_map, self.neg_mass

    def to_dict(self) -> dict:
        ref = {**self.reference.to_dict(), "kind": self.reference_kind, "method": self.method}
        return {
            "reference": ref,
            "pos_mass": self.pos_mass,
            "neg_mass": self.neg_mass,
            "pos_map": [float(v) for v in self.pos_map],
            "neg_map": [float(v) for v in self.neg_map],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Scdt:
        ref = d["reference"]
        return cls(np.asarray(d["pos_map"], dtype=float), d["pos_mass"],
                   np.asarray(d["neg_map"], dtype=float), d["neg_mass"],
                   Grid.from_dict(ref), ref.get("kind", "custom"), ref.get("method", "spline"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> Scdt:
        return cls.from_dict(json.loads(Path(path).read_text()))


def scdt(s: Signal, s0: Signal, method: str = "spline", reference_kind: str = "custom") -> Scdt:
    """Signed CDT of ``s`` with respect to the density ``s0``."""
    pos_map, pos_mass, neg_map, neg_mass = part_maps(s, s0, method)
    return Scdt(pos_map, pos_mass, neg_map, neg_mass, s0.grid, reference_kind, method)


def _invert_part(T: np.ndarray, levels: np.ndarray, grid: Grid, method: str) -> np.ndarray:
    """Unit-mass samples whose cumulation passes through ``(T_k, level_k)``."""
    if T[-1] - T[0] <= 0:
        raise DegenerateMap("transport map is constant over the whole reference domain")
    G = np.interp(grid.t, T, levels, left=0.0, right=levels[-1])
    if method == "riemann":
        # prefix sums: each sample owns the cell ending at it
        v = np.diff(G, prepend=0.0)
    else:
        # exact cumulation: average the two cells touching each sample
        cell = np.diff(G)
        v = np.empty(grid.n)
        v[1:-1] = 0.5 * (cell[:-1] + cell[1:])
        v[0], v[-1] = cell[0], cell[-1]
    total = v.sum() * grid.dt
    if total <= 0:
        raise DegenerateMap("transport map leaves no mass on the output grid")
    return v / total


def inverse_scdt(x: Scdt, s0: Signal, grid: Grid | None = None) -> Signal:
    """Numerical inverse of :func:`scdt`, sampled on ``grid`` (default: s0's grid)."""
    if x.reference != s0.grid:
        raise ValueError("transform was computed against a different reference grid")
    grid = s0.grid if grid is None else grid
    levels = reference_levels(s0, x.method)
    levels = levels / levels[-1]
    out = np.zeros(grid.n)
    if not x.pos_trivial:
        out += x.pos_mass * _invert_part(x.pos_map, levels, grid, x.method)
    if not x.neg_trivial:
        out -= x.neg_mass * _invert_part(x.neg_map, levels, grid, x.method)
    return Signal(grid, out)


def compose_scdt(h: Callable, x: Scdt) -> Scdt:
    """Apply ``h`` pointwise to both transport maps; masses are unchanged."""

    def apply(m, trivial):
        if trivial:
            return m
        try:
            with np.errstate(invalid="raise", divide="raise"):
                v = np.asarray(h(m), dtype=float)
        except (FloatingPointError, DomainError) as exc:
            raise DomainError(f"map value outside the domain of h: {exc}") from exc
        if v.shape != m.shape or not np.all(np.isfinite(v)):
            raise DomainError("h is undefined at some map value")
        return v

    return Scdt(apply(x.pos_map, x.pos_trivial), x.pos_mass,
                apply(x.neg_map, x.neg_trivial), x.neg_mass,
                x.reference, x.reference_kind, x.method)


def uniform_reference(t_min: float = 0.0, t_max: float = 1.0, n: int = 2048) -> Signal:
    return uniform(Grid(t_min, t_max, n))

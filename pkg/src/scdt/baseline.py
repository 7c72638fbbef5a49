"""Native-space estimators: L2 delay matching and the wide-band ambiguity function."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .signal import Signal


@dataclass(frozen=True)
class GridSearchSpec:
    """Search lattice given as one ``(min, max, steps)`` triple per parameter."""

    axes: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        axes = tuple((float(lo), float(hi), int(n)) for lo, hi, n in self.axes)
        for lo, hi, n in axes:
            if n < 2:
                raise ValueError("each search axis needs at least 2 steps")
            if not lo < hi:
                raise ValueError(f"search axis needs min < max, got [{lo}, {hi}]")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def of(cls, *axes) -> GridSearchSpec:
        return cls(tuple(axes))

    def values(self, i: int) -> np.ndarray:
        lo, hi, n = self.axes[i]
        return np.linspace(lo, hi, n)

    @property
    def ndim(self) -> int:
        return len(self.axes)


@dataclass(frozen=True, eq=False)
class Surface:
    """Values on a 2-D parameter lattice; ``values[i, j]`` sits at ``(p1[i], p2[j])``."""

    p1: np.ndarray
    p2: np.ndarray
    values: np.ndarray

    def argmin(self) -> tuple[int, int]:
        i, j = np.unravel_index(np.argmin(self.values), self.values.shape)
        return int(i), int(j)

    def argmax(self) -> tuple[int, int]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return int(i), int(j)

    def normalized(self, flip: bool = False) -> Surface:
        """Rescale to [0, 1]; ``flip`` turns a maximization surface into 'lower is better'."""
        v = self.values
        span = v.max() - v.min()
        u = (v - v.min()) / span if span > 0 else np.zeros_like(v)
        return Surface(self.p1, self.p2, 1 - u if flip else u)

    def rows(self):
        for i, a in enumerate(self.p1):
            for j, b in enumerate(self.p2):
                yield float(a), float(b), float(self.values[i, j])

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["param1", "param2", "cost"])
            for a, b, c in self.rows():
                w.writerow([repr(a), repr(b), repr(c)])


def count_local_maxima(values: np.ndarray) -> int:
    """Number of interior cells strictly greater than all 8 neighbours."""
    v = np.asarray(values)
    c = v[1:-1, 1:-1]
    is_max = np.ones_like(c, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_max &= c > v[1 + di:v.shape[0] - 1 + di, 1 + dj:v.shape[1] - 1 + dj]
    return int(is_max.sum())


def convexity_audit(values: np.ndarray, rtol: float = 1e-9) -> bool:
    """True when every row and column has second differences >= -rtol * scale."""
    v = np.asarray(values, dtype=float)
    tol = rtol * max(float(np.max(np.abs(v))), 1.0)
    return bool(np.all(np.diff(v, 2, axis=0) >= -tol) and np.all(np.diff(v, 2, axis=1) >= -tol))


# L2 delay -------------------------------------------------------------------

def l2_delay_cost(r: Signal, s: Signal, spec: GridSearchSpec) -> np.ndarray:
    """``||s(. - tau) - r||_2^2`` on r's grid for each tau of a 1-D spec."""
    if spec.ndim != 1:
        raise ValueError("l2 delay search takes a single-parameter spec")
    t = r.grid.t
    taus = spec.values(0)
    cost = np.empty(taus.size)
    for i, tau in enumerate(taus):
        d = s(t - tau) - r.values
        cost[i] = np.sum(d * d) * r.grid.dt
    return cost


def l2_delay_estimate(r: Signal, s: Signal, spec: GridSearchSpec) -> float:
    """Delay ``tau`` minimizing ``||s(t - tau) - r(t)||^2`` over the search grid."""
    return float(spec.values(0)[np.argmin(l2_delay_cost(r, s, spec))])


# wide-band ambiguity ----------------------------------------------------------

def wbaf_surface(r: Signal, s: Signal, spec: GridSearchSpec) -> Surface:
    """``A(omega, tau) = sqrt(omega) * int r(t) s(omega t + tau) dt`` on a 2-D spec.

    Trapezoid quadrature on r's grid; s is linearly interpolated and zero
    outside its own grid.
    """
    if spec.ndim != 2:
        raise ValueError("wbaf search takes a (omega, tau) spec")
    omegas, taus = spec.values(0), spec.values(1)
    if np.any(omegas <= 0):
        raise ValueError("omega must stay positive over the search window")
    t = r.grid.t
    wq = np.full(t.size, r.grid.dt)
    wq[[0, -1]] *= 0.5
    rw = r.values * wq
    A = np.empty((omegas.size, taus.size))
    for i, om in enumerate(omegas):
        x = om * t[None, :] + taus[:, None]
        A[i] = np.sqrt(om) * (s(x) @ rw)
    return Surface(omegas, taus, A)


def wbaf_estimate(r: Signal, s: Signal, spec: GridSearchSpec) -> tuple[float, float]:
    surf = wbaf_surface(r, s, spec)
    i, j = surf.argmax()
    return float(surf.p1[i]), float(surf.p2[j])

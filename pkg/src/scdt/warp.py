"""Parametric warp families g_p used by the generative model s_g(t) = g'(t) s(g(t))."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError

FAMILIES = ("polynomial", "affine", "quadratic_dispersion", "exponential", "logarithmic")

_BISECT_ITERS = 80


@dataclass(frozen=True)
class WarpModel:
    """A warp function from one of the supported families.

    Coefficient conventions:

    * ``polynomial``: ascending ``(p0, p1, ..., pk)`` for ``sum p_n t**n``
    * ``affine``: ``(omega, tau)`` for ``omega * t + tau``
    * ``quadratic_dispersion``: ``(kappa, tau)`` for ``kappa * t**2 + tau``
    * ``exponential``: ``(a, b)`` for ``exp(a * t + b)``
    * ``logarithmic``: ``(a, b)`` for ``log(a * t + b)``
    """

    family: str
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown warp family {self.family!r}; expected one of {FAMILIES}")
        coef = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coef)
        if not coef or not all(np.isfinite(coef)):
            raise ValueError("warp coefficients must be a non-empty sequence of finite numbers")
        if self.family != "polynomial" and len(coef) != 2:
            raise ValueError(f"{self.family} warp takes exactly 2 coefficients, got {len(coef)}")
        if self.family == "affine" and coef[0] <= 0:
            raise ValueError("affine warp requires omega > 0")
        if self.family == "quadratic_dispersion" and coef[0] <= 0:
            raise ValueError("quadratic_dispersion warp requires kappa > 0")
        if self.family in ("exponential", "logarithmic") and coef[0] == 0:
            raise ValueError(f"{self.family} warp requires a != 0")

    # constructors -----------------------------------------------------------

    @classmethod
    def polynomial(cls, *coefficients: float) -> WarpModel:
        return cls("polynomial", tuple(coefficients))

    @classmethod
    def affine(cls, omega: float, tau: float) -> WarpModel:
        return cls("affine", (omega, tau))

    @classmethod
    def quadratic_dispersion(cls, kappa: float, tau: float) -> WarpModel:
        return cls("quadratic_dispersion", (kappa, tau))

    @classmethod
    def exponential(cls, a: float, b: float) -> WarpModel:
        return cls("exponential", (a, b))

    @classmethod
    def logarithmic(cls, a: float, b: float) -> WarpModel:
        return cls("logarithmic", (a, b))

    @classmethod
    def identity(cls) -> WarpModel:
        return cls("polynomial", (0.0, 1.0))

    @classmethod
    def from_dict(cls, d: dict) -> WarpModel:
        return cls(d["family"], tuple(d["coefficients"]))

    def to_dict(self) -> dict:
        return {"family": self.family, "coefficients": list(self.coefficients)}

    # evaluation -------------------------------------------------------------

    @property
    def degree(self) -> int | None:
        return len(self.coefficients) - 1 if self.family == "polynomial" else None

    def as_polynomial(self) -> np.ndarray | None:
        """Ascending power-basis coefficients, or None for transcendental families."""
        c = self.coefficients
        if self.family == "polynomial":
            return np.array(c)
        if self.family == "affine":
            return np.array([c[1], c[0]])
        if self.family == "quadratic_dispersion":
            return np.array([c[1], 0.0, c[0]])
        return None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.coefficients[0], self.coefficients[-1]
        if self.family == "exponential":
            return np.exp(a * t + b)
        if self.family == "logarithmic":
            arg = a * t + b
            if np.any(arg <= 0):
                raise DomainError("logarithmic warp evaluated where a*t + b <= 0")
            return np.log(arg)
        return P.polyval(t, self.as_polynomial())

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.coefficients[0], self.coefficients[-1]
        if self.family == "exponential":
            return a * np.exp(a * t + b)
        if self.family == "logarithmic":
            arg = a * t + b
            if np.any(arg <= 0):
                raise DomainError("logarithmic warp evaluated where a*t + b <= 0")
            return a / arg
        return P.polyval(t, P.polyder(self.as_polynomial()))

    def increasing_branches(self) -> list[tuple[float, float]]:
        """Maximal open intervals on which g is strictly increasing."""
        c = self.coefficients
        if self.family == "affine":
            return [(-np.inf, np.inf)]
        if self.family == "quadratic_dispersion":
            return [(0.0, np.inf)]
        if self.family == "exponential":
            return [(-np.inf, np.inf)] if c[0] > 0 else []
        if self.family == "logarithmic":
            return [(-c[1] / c[0], np.inf)] if c[0] > 0 else []

        d = P.polyder(np.array(c))
        if d.size == 0 or not np.any(d):
            return []
        # leading terms below eps relative to the largest only move roots past 1/eps
        keep = np.flatnonzero(np.abs(d) > np.finfo(float).eps * np.max(np.abs(d)))
        d = d[:keep[-1] + 1]
        roots = P.polyroots(d) if d.size > 1 else np.array([])
        crit = np.unique(np.sort(roots[np.abs(roots.imag) < 1e-12].real))
        edges = np.concatenate([[-np.inf], crit, [np.inf]])
        branches = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if np.isinf(lo) and np.isinf(hi):
                mid = 0.0
            elif np.isinf(lo):
                mid = hi - 1.0
            elif np.isinf(hi):
                mid = lo + 1.0
            else:
                mid = 0.5 * (lo + hi)
            if P.polyval(mid, d) > 0:
                branches.append((float(lo), float(hi)))
        return branches

    def inverse(self, y, bracket: tuple[float, float] | None = None):
        """Evaluate g^{-1}(y) on an increasing branch of g.

        Closed forms are used where they exist. Higher-degree polynomials
        are inverted by vectorized bisection on ``bracket``, or on the
        increasing branch whose range contains all of ``y`` when no bracket
        is given.
        """
        y = np.asarray(y, dtype=float)
        c = self.coefficients
        if self.family == "affine":
            return (y - c[1]) / c[0]
        if self.family == "quadratic_dispersion":
            u = (y - c[1]) / c[0]
            if np.any(u < 0):
                raise DomainError("quadratic_dispersion inverse needs y >= tau")
            return np.sqrt(u)
        if self.family == "exponential":
            if np.any(y <= 0):
                raise DomainError("exponential warp inverse needs y > 0")
            return (np.log(y) - c[1]) / c[0]
        if self.family == "logarithmic":
            return (np.exp(y) - c[1]) / c[0]

        poly = np.trim_zeros(np.array(c), "b")
        if poly.size <= 1:
            raise DomainError("constant polynomial warp has no inverse")
        if poly.size == 2:
            return (y - poly[0]) / poly[1]
        if y.size == 0:
            return y.copy()
        ymin, ymax = float(np.min(y)), float(np.max(y))
        if bracket is None:
            bracket = self._branch_for(ymin, ymax)
        lo, hi = self._finite_bracket(bracket, ymin, ymax)
        if self(lo) > ymin or self(hi) < ymax:
            raise DomainError("values outside the range of g on the requested branch")
        a = np.full(y.shape, lo)
        b = np.full(y.shape, hi)
        for _ in range(_BISECT_ITERS):
            m = 0.5 * (a + b)
            below = self(m) < y
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        return 0.5 * (a + b)

    def _branch_for(self, ymin, ymax):
        for lo, hi in reversed(self.increasing_branches()):
            glo = self.limit(lo)
            ghi = self.limit(hi)
            if glo <= ymin and ghi >= ymax:
                return lo, hi
        raise DomainError(f"no increasing branch of g covers [{ymin}, {ymax}]")

    def limit(self, t: float) -> float:
        """g(t), extended by its limit at +-inf and at the edge of the log domain."""
        c = self.coefficients
        if self.family == "logarithmic" and c[0] * t + c[1] <= 0:
            return -np.inf
        if np.isfinite(t):
            return float(self(t))
        if self.family == "exponential":
            return 0.0 if c[0] * t < 0 else np.inf
        if self.family == "logarithmic":
            return np.inf
        lead = np.trim_zeros(self.as_polynomial(), "b")
        sign = np.sign(lead[-1]) * (np.sign(t) ** (lead.size - 1))
        return float(sign * np.inf)

    def _finite_bracket(self, bracket, ymin, ymax):
        lo, hi = map(float, bracket)
        step = 1.0
        if np.isinf(lo):
            lo = (hi if np.isfinite(hi) else 0.0) - step
            while self(lo) > ymin:
                step *= 2
                lo -= step
        step = 1.0
        if np.isinf(hi):
            hi = lo + step
            while self(hi) < ymax:
                step *= 2
                hi += step
        return lo, hi

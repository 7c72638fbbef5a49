"""Closed-form warp estimation by weighted least squares in transform space.

For a warp that is linear in its parameters, ``g_p o r_hat ~ s_hat`` is a
linear system in ``p``: each nontrivial Jordan part contributes one block of
rows, weighted by the reference density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .baseline import GridSearchSpec, Surface
from .errors import DegenerateDesign, DomainError, PartMismatch
from .signal import Signal
from .transform import TOP_LEVEL_RTOL, Scdt, reference_levels, scdt
from .warp import FAMILIES, WarpModel

__all__ = [
    "WarpModel", "EstimationResult", "design_matrix", "solve_stacked_lsq",
    "estimate_warp", "estimate_from_transforms", "cost_surface", "cost_surface_from_transforms",
]

RANK_RTOL = 1e-10
TWO_PARAM = ("affine", "quadratic_dispersion")


@dataclass(frozen=True)
class EstimationResult:
    model: WarpModel
    residual: float
    condition: float
    monotone_on: tuple[float, float] | None


def _basis(m: np.ndarray, family: str, degree: int | None) -> np.ndarray:
    if family == "polynomial":
        if degree is None or degree < 0:
            raise ValueError("polynomial family needs a degree >= 0")
        return np.vander(m, degree + 1, increasing=True)
    if family == "affine":
        return np.column_stack([m, np.ones_like(m)])
    if family == "quadratic_dispersion":
        return np.column_stack([m * m, np.ones_like(m)])
    if family == "exponential":
        if np.any(m <= 0):
            raise DomainError("exponential family takes logs of map values, which must be > 0")
        return np.column_stack([np.log(m), np.ones_like(m)])
    if family == "logarithmic":
        with np.errstate(over="raise"):
            try:
                e = np.exp(m)
            except FloatingPointError as exc:
                raise DomainError("exp overflow in logarithmic family basis") from exc
        return np.column_stack([e, np.ones_like(m)])
    raise ValueError(f"unknown warp family {family!r}; expected one of {FAMILIES}")


def design_matrix(x_hat: Scdt, family: str, degree: int | None = None) -> np.ndarray:
    """Stack the family's basis evaluated on the positive map over the negative map.

    Trivial parts contribute no rows. Polynomials use ``[1, m, ..., m^k]``,
    affine ``[m, 1]``, quadratic dispersion ``[m^2, 1]``, exponential
    ``[log m, 1]`` and logarithmic ``[exp m, 1]``.
    """
    blocks = [_basis(m, family, degree) for m, _ in x_hat.parts()]
    X = np.vstack(blocks) if blocks else np.empty((0, 0))
    _check_rank(X)
    return X


def _check_rank(X: np.ndarray):
    if X.size == 0:
        raise DegenerateDesign("both parts are trivial")
    sv = np.linalg.svd(X, compute_uv=False)
    if X.shape[0] < X.shape[1] or sv[-1] <= RANK_RTOL * sv[0]:
        raise DegenerateDesign(
            f"design has {X.shape[1]} columns but numerically fewer independent ones")


def solve_stacked_lsq(X: np.ndarray, y: np.ndarray, w: np.ndarray | None = None) -> np.ndarray:
    """Minimize ``sum w_i (X p - y)_i^2`` via a QR factorization of ``sqrt(w) X``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    sw = np.ones(X.shape[0]) if w is None else np.sqrt(np.asarray(w, dtype=float))
    A = X * sw[:, None]
    b = y * sw
    Q, R = np.linalg.qr(A, mode="reduced")
    sv = np.linalg.svd(R, compute_uv=False)
    if X.shape[0] < X.shape[1] or sv[-1] <= RANK_RTOL * sv[0]:
        raise DegenerateDesign("weighted design matrix is rank deficient")
    return solve_triangular(R, Q.T @ b)


def _check_parts(r_hat: Scdt, s_hat: Scdt):
    if r_hat.pos_trivial != s_hat.pos_trivial or r_hat.neg_trivial != s_hat.neg_trivial:
        raise PartMismatch("received and template signals have different trivial parts")
    if r_hat.reference != s_hat.reference:
        raise ValueError("transforms use different reference grids")


def _stack(x_hat: Scdt, rows: np.ndarray | None = None) -> np.ndarray:
    return np.concatenate([m if rows is None else m[rows] for m, _ in x_hat.parts()])


def interior_rows(s0: Signal, method: str) -> np.ndarray:
    """Reference samples whose level lies strictly inside (0, 1).

    Level 0 maps to the start of a part's support and level 1 to ``t_max``
    (the empty-set convention); neither carries information about the warp.
    """
    lv = reference_levels(s0, method)
    lv = lv / lv[-1]
    return (lv > 0) & (lv < 1 - TOP_LEVEL_RTOL)


def _regression(r_hat: Scdt, s_hat: Scdt, s0: Signal, family: str, degree: int | None):
    _check_parts(r_hat, s_hat)
    rows = interior_rows(s0, r_hat.method)
    w0 = (s0.values * s0.grid.dt)[rows]
    w = np.concatenate([w0 for _ in r_hat.parts()])
    if family in ("exponential", "logarithmic"):
        basis_from, target = s_hat, r_hat
    else:
        basis_from, target = r_hat, s_hat
    blocks = [_basis(m[rows], family, degree) for m, _ in basis_from.parts()]
    X = np.vstack(blocks) if blocks else np.empty((0, 0))
    _check_rank(X)
    return X, _stack(target, rows), w


def _monotone_on(model: WarpModel, lo: float, hi: float, samples: int = 2001):
    if not hi > lo:
        return None
    t = np.linspace(lo, hi, samples)
    try:
        ok = model.derivative(t) > 0
    except DomainError:
        return None
    if not ok.any():
        return None
    # longest run of positive slope
    edges = np.diff(np.concatenate([[0], ok.astype(int), [0]]))
    starts, stops = np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)
    k = np.argmax(stops - starts)
    return float(t[starts[k]]), float(t[stops[k] - 1])


def _model_from(family: str, c: np.ndarray) -> WarpModel:
    try:
        if family in ("polynomial", "affine", "quadratic_dispersion"):
            return WarpModel(family, tuple(c))
        # linearized inverse: r_hat ~ c0 * basis(s_hat) + c1 with c0 = 1/a, c1 = -b/a
        if c[0] == 0 or not np.isfinite(1 / c[0]):
            raise DegenerateDesign("linearized slope is zero; a is unbounded")
        a = 1.0 / c[0]
        return WarpModel(family, (a, -c[1] * a))
    except ValueError as exc:
        if isinstance(exc, DegenerateDesign):
            raise
        raise DomainError(f"recovered coefficients are not a valid {family} warp: {exc}") from exc


def estimate_from_transforms(r_hat: Scdt, s_hat: Scdt, s0: Signal, family: str,
                             degree: int | None = None) -> EstimationResult:
    """Least-squares warp estimate from precomputed transforms of ``r`` and ``s``."""
    X, y, w = _regression(r_hat, s_hat, s0, family, degree)
    c = solve_stacked_lsq(X, y, w)
    resid = float(np.sum(w * (X @ c - y) ** 2))
    sw = np.sqrt(w)[:, None]
    sv = np.linalg.svd(X * sw, compute_uv=False)
    model = _model_from(family, c)
    m = _stack(r_hat, interior_rows(s0, r_hat.method))
    return EstimationResult(model, resid, float(sv[0] / sv[-1]),
                            _monotone_on(model, float(m.min()), float(m.max())))


def estimate_warp(r: Signal, s: Signal, s0: Signal, family: str, degree: int | None = None,
                  method: str = "spline") -> EstimationResult:
    """Recover ``g`` with ``r ~ g' * s(g)`` from the transforms of ``r`` and ``s``.

    Linear families regress ``s_hat`` on the basis of ``r_hat``; the
    exponential and logarithmic families regress ``r_hat`` on the basis of
    ``s_hat`` (``g^{-1}`` is linear in ``(1/a, b/a)`` there) and back-solve.
    """
    return estimate_from_transforms(scdt(r, s0, method), scdt(s, s0, method), s0, family, degree)


def cost_surface_from_transforms(r_hat: Scdt, s_hat: Scdt, s0: Signal, family: str,
                                 spec: GridSearchSpec) -> Surface:
    """Transform-space objective ``||g_p o r_hat - s_hat||^2`` over a 2-D parameter lattice."""
    if family not in TWO_PARAM or spec.ndim != 2:
        raise ValueError("cost surfaces are defined for affine or quadratic_dispersion "
                         "families over a 2-D spec")
    X, y, w = _regression(r_hat, s_hat, s0, family, None)
    p1, p2 = spec.values(0), spec.values(1)
    J = np.empty((p1.size, p2.size))
    for i, a in enumerate(p1):
        resid = a * X[:, 0][None, :] + p2[:, None] * X[:, 1][None, :] - y[None, :]
        J[i] = (resid * resid) @ w
    return Surface(p1, p2, J)


def cost_surface(r: Signal, s: Signal, s0: Signal, family: str, spec: GridSearchSpec,
                 method: str = "spline") -> Surface:
    return cost_surface_from_transforms(scdt(r, s0, method), scdt(s, s0, method), s0, family, spec)

"""Wasserstein-2 distance between densities and the signed distance D_S."""

from __future__ import annotations

import numpy as np

from .errors import PartMismatch, ReferenceMismatch
from .signal import Signal, jordan_decompose, normalize_l1
from .transform import TRIVIAL_MASS, Scdt, _check_density, cdt


def _weights(s0: Signal) -> np.ndarray:
    return s0.values * s0.grid.dt


def wasserstein2(p: Signal, q: Signal, s0: Signal, method: str = "spline") -> float:
    """W2 distance of two unit-mass densities, ``(sum |C(p) - C(q)|^2 s0 dt)^(1/2)``.

    In 1-D the optimal plan is monotone, so the distance is the
    ``L2(s0)`` distance between the two transport maps from ``s0``.
    """
    _check_density(s0, "reference")
    diff = cdt(p, s0, method) - cdt(q, s0, method)
    return float(np.sqrt(np.sum(diff * diff * _weights(s0))))


def _nontrivial(mass: float, total: float) -> bool:
    return mass > 0 and mass > TRIVIAL_MASS * total


def signed_distance(r: Signal, s: Signal, s0: Signal, method: str = "spline") -> float:
    """D_S(r, s): part-wise W2 between normalized Jordan parts plus squared mass gaps.

    Raises :class:`PartMismatch` when a part is trivial in one signal but not
    the other, where the normalized part is undefined.
    """
    jr, js = jordan_decompose(r), jordan_decompose(s)
    tot_r = jr.pos_mass + jr.neg_mass
    tot_s = js.pos_mass + js.neg_mass
    d2 = 0.0
    for name, pr, mr, ps, ms in (("positive", jr.pos, jr.pos_mass, js.pos, js.pos_mass),
                                 ("negative", jr.neg, jr.neg_mass, js.neg, js.neg_mass)):
        nr, ns = _nontrivial(mr, tot_r), _nontrivial(ms, tot_s)
        if nr != ns:
            raise PartMismatch(f"{name} part is trivial in only one of the two signals")
        if nr:
            d2 += wasserstein2(normalize_l1(pr), normalize_l1(ps), s0, method) ** 2
            d2 += (mr - ms) ** 2
    return float(np.sqrt(d2))


def transform_distance(x: Scdt, y: Scdt, s0: Signal, include_masses: bool = True) -> float:
    """Weighted L2 distance between two signed transforms.

    With ``include_masses=False`` the mass coordinates are ignored and only
    the transport maps are compared.
    """
    if x.reference != y.reference or x.reference != s0.grid:
        raise ReferenceMismatch("transforms and s0 must share one reference grid")
    if x.method != y.method:
        raise ReferenceMismatch(f"transforms use different methods: {x.method} vs {y.method}")
    if x.pos_trivial != y.pos_trivial or x.neg_trivial != y.neg_trivial:
        raise PartMismatch("transforms have different trivial parts")
    w = _weights(s0)
    d2 = 0.0
    for (mx, ax), (my, ay) in zip(x.parts(), y.parts()):
        d2 += float(np.sum((mx - my) ** 2 * w))
        if include_masses:
            d2 += (ax - ay) ** 2
    return float(np.sqrt(d2))

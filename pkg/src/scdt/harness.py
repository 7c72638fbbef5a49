"""Config-driven synthetic experiments: warp a template, run estimators, write reports.

A config is a JSON object::

    {
      "name": "cubic",
      "grid": {"t_min": 0, "t_max": 1, "n": 2048},
      "template": {"generator": "gabor", "params": {}},      # or {"csv": "s.csv"}
      "warp": {"family": "polynomial", "coefficients": [0.1, 0.01, 1, 2]},
      "received": {"grid": {...}},                           # optional, or {"csv": "r.csv"}
      "reference": {"kind": "uniform", "t_min": 0, "t_max": 1, "n": 2048},
      "method": "spline",
      "estimators": [
        {"kind": "scdt", "family": "polynomial", "degree": 3},
        {"kind": "wbaf", "search": [[0.5, 1.5, 101], [-0.3, 0.3, 101]]},
        {"kind": "l2_delay", "search": [[-0.3, 0.3, 601]]}
      ],
      "surface": {"family": "affine", "search": [[...], [...]]},
      "curve_points": 201,
      "output_dir": "out/cubic",
      "timing": false
    }

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baseline
from .baseline import GridSearchSpec, Surface
from .errors import ConfigError, ScdtError
from .estimate import cost_surface_from_transforms, estimate_from_transforms
from .signal import (GENERATORS, Grid, Signal, apply_warp, covering_grid, read_signal_csv, uniform,
                     write_signal_csv)
from .transform import METHODS, scdt
from .warp import WarpModel

log = logging.getLogger(__name__)

DEFAULT_GRID = {"t_min": 0.0, "t_max": 1.0, "n": 2048}
ESTIMATOR_KINDS = ("scdt", "wbaf", "l2_delay")


@dataclass
class ExperimentConfig:
    name: str
    grid: Grid
    template: dict
    warp: WarpModel | None
    received: dict
    reference: dict
    method: str
    estimators: list[dict]
    surface: dict | None
    curve_points: int
    output_dir: Path | None
    timing: bool
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, d: dict, base_dir: str | Path | None = None) -> ExperimentConfig:
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        try:
            grid = Grid.from_dict(d.get("grid", DEFAULT_GRID))
            warp = WarpModel.from_dict(d["warp"]) if d.get("warp") else None
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid grid or warp: {exc}") from exc
        template = d.get("template", {"generator": "gabor"})
        if "csv" in template:
            if not (base / template["csv"]).is_file():
                raise ConfigError(f"template file not found: {template['csv']}")
        elif template.get("generator") not in GENERATORS:
            raise ConfigError(f"unknown generator {template.get('generator')!r}; "
                              f"expected one of {sorted(GENERATORS)}")
        received = d.get("received", {})
        if "csv" in received and not (base / received["csv"]).is_file():
            raise ConfigError(f"received-signal file not found: {received['csv']}")
        if "csv" not in received and warp is None:
            raise ConfigError("config needs either a true warp or a received-signal csv")
        reference = d.get("reference", {"kind": "uniform"})
        if reference.get("kind", "uniform") != "uniform":
            raise ConfigError("only the uniform reference is supported in configs")
        method = d.get("method", "spline")
        if method not in METHODS:
            raise ConfigError(f"unknown method {method!r}")
        estimators = d.get("estimators", [])
        for e in estimators:
            if e.get("kind") not in ESTIMATOR_KINDS:
                raise ConfigError(f"unknown estimator kind {e.get('kind')!r}")
        out = d.get("output_dir")
        return cls(
            name=d.get("name", "experiment"), grid=grid, template=template, warp=warp,
            received=received, reference=reference, method=method, estimators=estimators,
            surface=d.get("surface"), curve_points=int(d.get("curve_points", 201)),
            output_dir=(base / out).resolve() if out else None, timing=bool(d.get("timing", False)),
            base_dir=base,
        )

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(d, base_dir=path.parent)


@dataclass
class Report:
    name: str
    true_warp: dict | None
    template_grid: dict
    received_grid: dict
    reference: dict
    method: str
    estimators: list[dict]
    curve: dict

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "method": self.method,
            "true_warp": self.true_warp,
            "template_grid": self.template_grid,
            "received_grid": self.received_grid,
            "reference": self.reference,
            "estimators": self.estimators,
            "curve": self.curve,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# building blocks ------------------------------------------------------------

def build_template(cfg: ExperimentConfig) -> Signal:
    t = cfg.template
    if "csv" in t:
        return read_signal_csv(cfg.base_dir / t["csv"])
    return GENERATORS[t["generator"]](cfg.grid, **t.get("params", {}))


def build_received(cfg: ExperimentConfig, s: Signal) -> Signal:
    rc = cfg.received
    if "csv" in rc:
        return read_signal_csv(cfg.base_dir / rc["csv"])
    grid = Grid.from_dict(rc["grid"]) if "grid" in rc else covering_grid(s, cfg.warp, cfg.grid.n)
    return apply_warp(s, cfg.warp, grid)


def build_reference(cfg: ExperimentConfig) -> Signal:
    ref = cfg.reference
    return uniform(Grid(ref.get("t_min", cfg.grid.t_min), ref.get("t_max", cfg.grid.t_max),
                        ref.get("n", cfg.grid.n)))


def _spec(axes) -> GridSearchSpec:
    return GridSearchSpec(tuple(tuple(a) for a in axes))


def _comparable(true: WarpModel, est: WarpModel):
    """Coefficient vectors of ``true`` and ``est`` in a shared parametrization."""
    if true.family == est.family and true.family != "polynomial":
        return np.array(true.coefficients), np.array(est.coefficients)
    a, b = true.as_polynomial(), est.as_polynomial()
    if a is None or b is None:
        return None
    k = max(a.size, b.size)
    return np.pad(a, (0, k - a.size)), np.pad(b, (0, k - b.size))


def _errors(true: WarpModel | None, est: WarpModel) -> dict:
    if true is None:
        return {}
    pair = _comparable(true, est)
    if pair is None:
        return {}
    a, b = pair
    abs_err = np.abs(b - a)
    rel = [float(e / abs(x)) if x != 0 else None for e, x in zip(abs_err, a)]
    return {"true_coefficients": [float(x) for x in a],
            "abs_error": [float(e) for e in abs_err],
            "rel_error": rel}


class _Transforms:
    """Lazily computed transforms shared by the SCDT estimators of one run."""

    def __init__(self, r, s, s0, method):
        self.r, self.s, self.s0, self.method = r, s, s0, method
        self._cache = None

    def get(self):
        if self._cache is None:
            self._cache = (scdt(self.r, self.s0, self.method), scdt(self.s, self.s0, self.method))
        return self._cache


def _run_one(e: dict, r: Signal, s: Signal, s0: Signal, tr: _Transforms) -> dict:
    kind = e["kind"]
    if kind == "scdt":
        r_hat, s_hat = tr.get()
        res = estimate_from_transforms(r_hat, s_hat, s0, e["family"], e.get("degree"))
        return {"recovered": res.model.to_dict(), "residual": res.residual,
                "condition": res.condition,
                "monotone_on": list(res.monotone_on) if res.monotone_on else None,
                "_model": res.model}
    if kind == "wbaf":
        om, tau = baseline.wbaf_estimate(r, s, _spec(e["search"]))
        model = WarpModel.affine(om, tau)
        return {"recovered": model.to_dict(), "_model": model}
    tau = baseline.l2_delay_estimate(r, s, _spec(e["search"]))
    # s(t - tau) ~ r(t) is the warp g(t) = t - tau
    model = WarpModel.affine(1.0, -tau)
    return {"recovered": model.to_dict(), "delay": tau, "_model": model}


def _label(e: dict, i: int) -> str:
    if "name" in e:
        return str(e["name"])
    if e["kind"] == "scdt":
        deg = f"{e['degree']}" if e.get("degree") is not None else ""
        return f"scdt_{e['family']}{deg}"
    return f"{e['kind']}_{i}"


def run_experiment(cfg: ExperimentConfig | dict, write: bool = True) -> Report:
    """Synthesize the received signal, run every estimator, optionally write outputs.

    A failing estimator is recorded with its error message; the others still run.
    """
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    s = build_template(cfg)
    r = build_received(cfg, s)
    s0 = build_reference(cfg)
    tr = _Transforms(r, s, s0, cfg.method)

    rows, models = [], {}
    for i, e in enumerate(cfg.estimators):
        label = _label(e, i)
        row = {"name": label, "kind": e["kind"]}
        if e["kind"] == "scdt":
            row.update(family=e.get("family"), degree=e.get("degree"))
        t0 = time.perf_counter()
        try:
            out = _run_one(e, r, s, s0, tr)
        except (ScdtError, ValueError, KeyError) as exc:
            log.warning("estimator %s failed: %s", label, exc)
            row["error"] = f"{type(exc).__name__}: {exc}"
        else:
            model = out.pop("_model")
            models[label] = model
            row.update(out)
            row.update(_errors(cfg.warp, model))
            if cfg.warp is not None:
                row["curve_max_abs_error"] = _curve_error(cfg.warp, model, r.grid, cfg.curve_points)
        if cfg.timing:
            row["wall_time"] = time.perf_counter() - t0
        rows.append(row)

    curve = g_curves(cfg.warp, models, r.grid, cfg.curve_points)
    report = Report(
        name=cfg.name,
        true_warp=cfg.warp.to_dict() if cfg.warp else None,
        template_grid=s.grid.to_dict(),
        received_grid=r.grid.to_dict(),
        reference={"kind": "uniform", **s0.grid.to_dict()},
        method=cfg.method,
        estimators=rows,
        curve=curve,
    )
    if write and cfg.output_dir is not None:
        write_outputs(cfg.output_dir, report, s, r)
        if cfg.surface:
            emit_surfaces(cfg)
    return report


def _curve_error(true: WarpModel, est: WarpModel, grid: Grid, points: int) -> float:
    t = np.linspace(grid.t_min, grid.t_max, points)
    try:
        return float(np.max(np.abs(est(t) - true(t))))
    except ScdtError:
        return float("nan")


def g_curves(true: WarpModel | None, models: dict, grid: Grid, points: int) -> dict:
    """True and recovered g(t) sampled over the received signal's interval."""
    t = np.linspace(grid.t_min, grid.t_max, points)
    cols = {"t": t}
    if true is not None:
        cols["true"] = true(t)
    for name, m in models.items():
        try:
            cols[name] = m(t)
        except ScdtError:
            cols[name] = np.full(points, np.nan)
    return {k: [float(x) for x in v] for k, v in cols.items()}


def _write_table(path: Path, cols: dict) -> None:
    names = list(cols)
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*(cols[n] for n in names)):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def write_outputs(out: Path, report: Report, s: Signal, r: Signal) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    _write_table(out / "g_curves.csv", report.curve)
    write_signal_csv(s, out / "template.csv")
    write_signal_csv(r, out / "received.csv")


# surfaces -------------------------------------------------------------------

def _cell(surf: Surface, p1: float, p2: float) -> list[int]:
    return [int(np.argmin(np.abs(surf.p1 - p1))), int(np.argmin(np.abs(surf.p2 - p2)))]


def compute_surfaces(cfg: ExperimentConfig | dict) -> tuple[Surface, Surface, dict]:
    """SCDT objective and WBAF surfaces over the config's 2-D window, with optimum annotations."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    if not cfg.surface:
        raise ConfigError("config has no 'surface' section")
    family = cfg.surface.get("family", "affine")
    if family not in ("affine", "quadratic_dispersion"):
        raise ConfigError("surfaces need an affine or quadratic_dispersion family")
    spec = _spec(cfg.surface["search"])
    if spec.ndim != 2:
        raise ConfigError("surface search must have exactly two axes")
    s = build_template(cfg)
    r = build_received(cfg, s)
    s0 = build_reference(cfg)
    r_hat, s_hat = scdt(r, s0, cfg.method), scdt(s, s0, cfg.method)
    sc = cost_surface_from_transforms(r_hat, s_hat, s0, family, spec)
    wb = baseline.wbaf_surface(r, s, spec)

    def opt(surf, cell):
        return {"cell": list(cell), "params": [float(surf.p1[cell[0]]), float(surf.p2[cell[1]])],
                "value": float(surf.values[cell])}

    note = {
        "family": family,
        "scdt_min": opt(sc, sc.argmin()),
        "wbaf_max": opt(wb, wb.argmax()),
        "scdt_convex": baseline.convexity_audit(sc.values),
        "wbaf_convex": baseline.convexity_audit(-wb.values),
        "wbaf_local_maxima": baseline.count_local_maxima(wb.values),
    }
    if cfg.warp is not None and cfg.warp.family == family:
        note["true_params"] = list(cfg.warp.coefficients)
        note["true_cell"] = _cell(sc, *cfg.warp.coefficients)
    return sc, wb, note


def emit_surfaces(cfg: ExperimentConfig | dict, out: str | Path | None = None) -> dict:
    """Write ``scdt_surface.csv``, ``wbaf_surface.csv``, a normalized comparison and ``surfaces.json``."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    out = Path(out) if out is not None else cfg.output_dir
    if out is None:
        raise ConfigError("no output directory given")
    sc, wb, note = compute_surfaces(cfg)
    out.mkdir(parents=True, exist_ok=True)
    sc.write_csv(out / "scdt_surface.csv")
    wb.write_csv(out / "wbaf_surface.csv")
    a, b = sc.normalized(), wb.normalized(flip=True)
    P1, P2 = np.meshgrid(sc.p1, sc.p2, indexing="ij")
    _write_table(out / "surfaces_normalized.csv", {
        "param1": P1.ravel(), "param2": P2.ravel(),
        "scdt": a.values.ravel(), "wbaf": b.values.ravel()})
    (out / "surfaces.json").write_text(json.dumps(note, indent=2) + "\n")
    return note

"""Signed cumulative distribution transform and transform-space warp estimation."""

from .baseline import (GridSearchSpec, Surface, convexity_audit, count_local_maxima,
                       l2_delay_estimate, wbaf_estimate, wbaf_surface)
from .errors import (ConfigError, DegenerateDesign, DegenerateMap, DomainError, NonMonotoneWarp,
                     NotADensity, PartMismatch, ReferenceMismatch, ScdtError, ZeroMass)
from .estimate import (EstimationResult, cost_surface, design_matrix, estimate_from_transforms,
                       estimate_warp, solve_stacked_lsq)
from .harness import ExperimentConfig, Report, emit_surfaces, run_experiment
from .metric import signed_distance, transform_distance, wasserstein2
from .signal import (Grid, JordanPair, Signal, apply_warp, covering_grid, gabor, gaussian,
                     interpolate, jordan_decompose, l1_norm, normalize_l1, read_signal_csv,
                     support, uniform, write_signal_csv)
from .transform import (Scdt, cdt, compose_scdt, cumulate, generalized_inverse, inverse_scdt,
                        scdt, uniform_reference)
from .warp import WarpModel

__version__ = "0.1.0"

"""Computable density theory for point sets in R^d.

Generate relatively separated point sets (lattices, cut-and-project model
sets), estimate Beurling and hull densities along Folner boxes, assemble
reproducing-kernel Gram systems (Paley-Wiener, Gaussian time-frequency),
canonicalize frames to Parseval form, and check necessary density conditions
for sampling and interpolation.
"""

__version__ = "0.1.0"

from .pointset import PointPatch, SeparationStats, is_relatively_dense, rel_separation, restrict, translate
from .cutproject import CutProjectScheme, Window, generate_model_set, model_set_covolume, regularity_diagnostics
from .hull import CFNeighborhoodSpec, ClusterPartition, cf_within, cluster_partition, orbit_sample
from .density import (
    CovolumeBounds,
    DensityReport,
    ErgodicEstimate,
    FolnerSpec,
    TestFunction,
    beurling_density,
    covolume_bounds_from_density,
    covolume_ergodic_estimate,
    hull_beurling_density,
    weil_check,
)
from .rkhs import CocycleSpec, KernelSpec, critical_density, gabor_gaussian, kernel_matrix, kernel_value, paley_wiener, wiener_amalgam_norm
from .framekit import (
    FrameReport,
    GramMatrix,
    VerdictReport,
    build_gram,
    canonical_parseval,
    frame_trend_report,
    riesz_bounds,
    sampling_bounds,
    translation_spectrum_invariance,
    verdict,
)

__all__ = [name for name in dir() if not name.startswith("_")]

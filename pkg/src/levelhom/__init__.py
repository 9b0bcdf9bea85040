"""
Consistent estimation of the homology of super-level sets from samples.

The pipeline goes from a sample to kernel estimates at the sample points,
to Rips complexes on the points above a level, to exact homology and
persistence. The main entry points are re-exported here.
"""

from .barcode import render_barcode
from .complexes import (
    FilteredComplex,
    SimplicialComplex,
    build_cech,
    build_filtered_rips,
    build_rips,
    miniball,
)
from .datagen import (
    GenSpec,
    gen_annulus_classification,
    gen_hierarchical_density,
    gen_mixture_regression,
    gen_noisy_manifold,
    gen_three_rings,
    generate,
)
from .errors import (
    CapacityExceeded,
    ConfigError,
    LevelHomError,
    MissingBound,
    MissingResponses,
    NoStableLevel,
    NotASubcomplex,
    OutOfRange,
    ParseError,
    UnsupportedDimension,
    UnsupportedFormat,
    WrongField,
)
from .estimators import (
    LevelEstimate,
    ManifoldRecovery,
    estimate_level_homology,
    estimate_ph,
    grid_ph_oracle,
    recover_manifold_homology,
)
from .homology import betti, betti_laplacian, boundary_matrix, harmonic_basis, image_rank, laplacian
from .kernels import (
    KernelSpec,
    LabeledSample,
    ModelBounds,
    compute_ck,
    eval_kernel,
    filter_points,
    kde,
    kde_at,
    nadaraya_watson,
    nw_at,
    recommended_bandwidth,
    sample_values,
    theory_constant,
)
from .linalg import RATIONALS, Field, FieldMatrix, kernel_basis, prime_field, rank
from .persistence import PersistenceDiagram, bottleneck, emit_tsv, parse_tsv, reduce, rips_persistence

__version__ = "0.1.0"

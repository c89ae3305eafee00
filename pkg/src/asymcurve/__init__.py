"""A chord-arc, asymptotically conformal Jordan curve that is not
asymptotically smooth, built by iterated bump refinement, plus estimators for
the regularity functionals that tell these classes apart."""

from .bump import BumpProfile, FoldError, PartitionSpec, bump_eval, embed_bump, embedded_speed, partition_equal
from .construction import (
    CurveStack,
    LevelParams,
    ParamMap,
    ResourceError,
    assemble_gamma,
    assemble_gamma_parts,
    build_gamma_n,
    build_level1,
    level_params,
    project_to_level,
    refine_level,
)
from .functionals import (
    ClassificationReport,
    PairScanConfig,
    ScanResult,
    chordarc_ratio,
    classify,
    conformality_ratio,
    scan_sup,
    smoothness_modulus,
    uniform_approx_n,
)
from .geometry import (
    CurvatureProfile,
    CurveError,
    FrenetSample,
    PlanarPoint,
    SampledCurve,
    SubarcRef,
    arc_length,
    curvature_profile,
    frenet_frame,
    inflection_points,
    max_deviation,
    resample_by_arclength,
    subarc,
)

__version__ = "0.1.0"

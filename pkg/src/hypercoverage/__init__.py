"""Space-filling sampling designs and subspace-coverage experiments.

Generate Latin Hypercube and Orthogonal samples over discrete grids,
verify their structure, and measure how quickly repeated trials cover
low-dimensional projections of the parameter space.
"""

from .coverage import (
    CampaignConfig,
    CoverageCampaignResult,
    CoverageState,
    CurvePoint,
    SubBlockHistogram,
    asymptotic_coverage,
    conjectured_coverage,
    coverage_curve,
    covered_fraction,
    fit_loglog_gradient,
    run_campaign,
    subblock_histogram,
    trials_for_full_coverage_estimate,
)
from .orthogonal_arrays import (
    OrthogonalArray,
    build_oa_strength2,
    randomize_oa,
    read_oa,
    tang_expand,
    verify_strength,
    write_oa,
)
from .rng import substream
from .sampling import (
    BlockCoordinate,
    OsParameters,
    SampleMatrix,
    decompose_level,
    generate_lhs,
    generate_os,
    infer_block_size,
    is_latin,
    is_orthogonal_sample,
    read_sample,
    recompose_level,
    sample_from_csv,
    sample_from_json,
    sample_to_csv,
    sample_to_json,
    write_sample,
)

__version__ = "0.1.0"

__all__ = [
    "BlockCoordinate",
    "CampaignConfig",
    "CoverageCampaignResult",
    "CoverageState",
    "CurvePoint",
    "OrthogonalArray",
    "OsParameters",
    "SampleMatrix",
    "SubBlockHistogram",
    "asymptotic_coverage",
    "build_oa_strength2",
    "conjectured_coverage",
    "coverage_curve",
    "covered_fraction",
    "decompose_level",
    "fit_loglog_gradient",
    "generate_lhs",
    "generate_os",
    "infer_block_size",
    "is_latin",
    "is_orthogonal_sample",
    "randomize_oa",
    "read_oa",
    "read_sample",
    "recompose_level",
    "run_campaign",
    "sample_from_csv",
    "sample_from_json",
    "sample_to_csv",
    "sample_to_json",
    "subblock_histogram",
    "substream",
    "tang_expand",
    "trials_for_full_coverage_estimate",
    "verify_strength",
    "write_oa",
    "write_sample",
]

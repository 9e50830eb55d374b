"""Recovering Euclidean isometries from point correspondences."""

from ._core import (
    CertificationReport,
    CorrespondenceSet,
    EuclideanIsometry,
    MathError,
    ParseError,
    RecoveryConfig,
    affine_dimension,
    affinely_independent,
    certify,
    check_distance_preserving,
    distance,
    equidistance_collapse,
    extend_finite_isometry,
    generate,
    inner_by_polarization,
    inner_product,
    locate,
    procrustes_fit,
    recover_oracle,
    recover_robust,
    report_json,
    sample_gaussian,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]

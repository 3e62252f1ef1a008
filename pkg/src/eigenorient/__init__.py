"""Consistently oriented eigenbases and their directional statistics."""

from .errors import (
    AxisOutOfRange,
    DegenerateEnsemble,
    DimensionMismatch,
    EigenOrientError,
    InvalidDimension,
    NonOrthogonalMean,
    NonOrthonormalInput,
    ParseError,
    PivotNegative,
    SingularDesign,
    UndefinedMeanDirection,
)
from .orient import (
    EigenSystem,
    OrientedEigensystem,
    build_subspace_rotation,
    generate_oriented_eigenvectors,
    givens_rotation,
    orient_eigenvectors,
    solve_subspace_angles,
    sort_eigensystem,
    validate_angle_matrix,
)
from .dirstats import (
    BasisEnsemble,
    DispersionReport,
    MeanBasisReport,
    bessel_ratio,
    dispersion,
    kappa_approx,
    kappa_mle,
    mean_direction,
    mean_eigenbasis,
    subspace_vectors,
    vmf_sample,
)
from .eigenflow import (
    Panel,
    RegressionModel,
    TrackRecord,
    decompose_panel,
    fit,
    fit_averaged,
    predict,
    predict_averaged,
    regress,
    rolling_track,
    sign_changes,
)

__version__ = "0.1.0"

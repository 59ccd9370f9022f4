"""Linear eigenvalue statistics of windowed sample covariance matrices.

Multichannel recordings are cut into windows, each window is standardized and
turned into a sample covariance matrix, and a scalar feature
``sum_j phi(lambda_j)`` is computed from its spectrum.  Those features feed a
small set of from-scratch classifiers and a one-way ANOVA.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    FormatError,
    NonFiniteError,
    NotPSDError,
    NotSymmetricError,
    QuadratureError,
    RmtlesError,
    ZeroVarianceChannel,
)
from .ingest import Recording, WindowConfig, WindowMatrix, iter_windows, load_recording, save_recording  # noqa: E402
from .linalg import CovarianceMatrix, EigenSpectrum, eig_sym, sample_covariance, standardize, window_spectrum  # noqa: E402
from .rmt import (  # noqa: E402
    TEST_FUNCTIONS,
    CLTVarianceParams,
    MPLaw,
    clt_variance,
    esd_ks_distance,
    les,
    les_lln_limit,
    mp_cdf,
    mp_density,
    von_neumann_entropy,
)
from .pipeline import FeatureTable, extract_features  # noqa: E402

__all__ = [
    "CLTVarianceParams",
    "CovarianceMatrix",
    "EigenSpectrum",
    "FeatureTable",
    "FormatError",
    "MPLaw",
    "NonFiniteError",
    "NotPSDError",
    "NotSymmetricError",
    "QuadratureError",
    "Recording",
    "RmtlesError",
    "TEST_FUNCTIONS",
    "WindowConfig",
    "WindowMatrix",
    "ZeroVarianceChannel",
    "clt_variance",
    "eig_sym",
    "esd_ks_distance",
    "extract_features",
    "iter_windows",
    "les",
    "les_lln_limit",
    "load_recording",
    "mp_cdf",
    "mp_density",
    "sample_covariance",
    "save_recording",
    "standardize",
    "von_neumann_entropy",
    "window_spectrum",
]

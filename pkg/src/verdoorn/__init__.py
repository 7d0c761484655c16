"""Spatial cross-section econometrics for regional productivity growth.

The toolkit covers the chain from regional accounts to a selected spatial
regression: growth vectors, distance-band weights, global and local Moran
statistics, OLS with spatial diagnostics, the classical specification
search and maximum-likelihood lag / error fits.
"""

from .errors import (
    DegenerateError,
    DiagnosticDegeneracyError,
    DomainError,
    EstimationError,
    InsufficientDataError,
    IntegrityError,
    ParameterError,
    SchemaError,
    SingularDesignError,
    ValidationError,
    VerdoornError,
)
from .ingest import GrowthVector, RegionalPanel, avg_growth, build_growth_vectors, load_panel, productivity
from .weights import SpatialWeights, distance, distance_band, row_standardize
from .moran import MoranResult, MoranScatter, moran_scatter, morans_i, permutation_test
from .lisa import LisaResult, classify, lisa, lisa_permutation, local_moran
from .ols import OlsReport, estimate_verdoorn_ols, lm_tests, ols
from .spatial_ml import SpatialFit, eigen_bounds, fit_error, fit_lag, likelihood_profile
from .specsearch import SpecDecision, decide, run_selected

__version__ = "0.1.0"

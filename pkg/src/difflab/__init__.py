"""difflab: random point sets on the line and plane, their diffraction, and
statistical verification of the closed-form theory against simulation."""

__version__ = "0.1.0"

from .core import (
    AllPointsExcluded,
    AtomLocation,
    ConfigError,
    DiffLabError,
    DimensionTooLarge,
    GridFunction,
    GridMismatch,
    NegativeArgument,
    NoConvergence,
    PointSet,
    SeedSpec,
    SingularPoint,
    SpectralMeasure,
    TooFewPoints,
    WeightedPointSet,
    Window,
    WindowTooLarge,
    point_density,
    read_grid_function,
    read_point_set,
    restrict,
    window_volume,
    write_grid_function,
    write_point_set,
)
from .specfun import (
    WaitingDistribution,
    char_fn,
    sinc_s,
    sinc_s_prime,
    sine_integral,
    sine_partial2,
    sine_tail,
)
from .linalg import ComplexMatrix, SymTridiag, complex_eigenvalues, symtridiag_eigenvalues
from .samplers import (
    mark_pm1,
    matern2_thin,
    sample_beta_bulk,
    sample_ginibre,
    sample_poisson,
    sample_renewal,
)
from .theory import (
    PurePointPart,
    dyson_f,
    dyson_h,
    ginibre_g,
    ginibre_h,
    marked_poisson_theory,
    poisson_theory,
    renewal_backscatter,
    renewal_nu_density,
    renewal_pure_point,
)
from .estimators import (
    average_replicas,
    banded_periodogram_1d,
    banded_periodogram_radial_2d,
    bragg_candidates,
    pair_correlation_1d,
    pair_correlation_radial_2d,
    periodogram_1d,
    periodogram_radial_2d,
)
from .config import ExperimentConfig, dumps_config, load_config, loads_config
from .verify import ComparisonReport, compare, run_experiment

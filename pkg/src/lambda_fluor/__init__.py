"""Resonance fluorescence of a laser-driven Lambda atom with vacuum-induced interference."""
from .analysis import (
    PeakReport,
    closed_form_population,
    count_sidebands,
    measure_peak,
    narrow_peak_prediction,
    optimal_detuning,
    relative_intensity,
)
from .dynamics import SteadyState, dark_state_scan, steady_state, time_evolve
from .errors import (
    LambdaFluorError,
    NoFluorescenceError,
    NoPeakError,
    NumericalError,
    ParameterError,
    PreconditionError,
    RegimeError,
)
from .model import BasisOperator, Liouvillian, SystemParams, build_liouvillian, operator_product
from .spectrum import (
    CovariancePair,
    SpectrumResult,
    coherent_intensity,
    compute_spectrum,
    covariance_init,
    incoherent_spectrum,
    make_grid,
    sum_rule_check,
    total_intensity,
)

__version__ = "0.1.0"

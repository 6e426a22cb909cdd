"""Option pricing under the exponential Variance-Gamma model.

Library surface:

* :mod:`vgpricer.vg_model` -- closed-form VG mathematics (cumulants, density,
  characteristic function, Levy measure, martingale correction).
* :mod:`vgpricer.lattice` -- moment-matched pentanomial tree and the CRR
  binomial Black-Scholes baseline.
* :mod:`vgpricer.pide_fd` -- explicit finite differences for the fourth-order
  PDE approximation of the pricing PIDE.
* :mod:`vgpricer.reference` -- independent quadrature and Black-Scholes oracles.
* :mod:`vgpricer.estimation` -- method-of-moments parameter fitting.
* :mod:`vgpricer.cli` -- the ``vgpricer`` batch command line.
"""

from .errors import (
    EstimationError,
    EvaluationError,
    GridTooNarrowWarning,
    InstabilityError,
    NegativeProbabilityError,
    NotVgFittableError,
    ParameterError,
    UnsupportedStyleError,
    VgPricerError,
)
from .estimation import (
    ReturnSeries,
    SampleMoments,
    VgFit,
    density_overlay_table,
    fit_normal,
    fit_vg_moments,
    sample_moments,
)
from .lattice import (
    LatticeConfig,
    OptionSpec,
    ProbVector,
    StepParams,
    binomial_bs_price,
    price_lattice,
    step_scale,
    terminal_prices,
    transition_probabilities,
    up_down_factors,
)
from .pide_fd import (
    FdCoefficients,
    GridConfig,
    UnitCumulants,
    default_grid,
    fd_coefficients,
    local_moments,
    p3_curve,
    positivity_report,
    price_fd,
)
from .reference import QuadratureConfig, black_scholes_price, quadrature_european_price
from .vg_model import (
    Cumulants,
    VgParams,
    bessel_k,
    central_moments_from_cumulants,
    characteristic_function,
    cumulants,
    levy_density,
    levy_symbol,
    martingale_correction,
    pdf,
    skew_kurt,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "VgPricerError", "ParameterError", "EvaluationError", "NegativeProbabilityError",
    "InstabilityError", "UnsupportedStyleError", "EstimationError", "NotVgFittableError",
    "GridTooNarrowWarning",
    # vg_model
    "VgParams", "Cumulants", "cumulants", "martingale_correction", "levy_density",
    "levy_symbol", "characteristic_function", "bessel_k", "pdf",
    "central_moments_from_cumulants", "skew_kurt",
    # lattice
    "LatticeConfig", "StepParams", "ProbVector", "OptionSpec", "step_scale",
    "transition_probabilities", "up_down_factors", "terminal_prices", "price_lattice",
    "binomial_bs_price",
    # pide_fd
    "GridConfig", "UnitCumulants", "FdCoefficients", "fd_coefficients", "local_moments",
    "default_grid", "price_fd", "p3_curve", "positivity_report",
    # reference
    "QuadratureConfig", "quadrature_european_price", "black_scholes_price",
    # estimation
    "ReturnSeries", "SampleMoments", "VgFit", "sample_moments", "fit_vg_moments",
    "fit_normal", "density_overlay_table",
]

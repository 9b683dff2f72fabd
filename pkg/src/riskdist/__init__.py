"""Distortion risk measures of comonotonic and counter-monotonic sums."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .decomposition import (ApplicabilityReport, CounterLogNormalSum, Decomposition, RootPair,
                            evaluate_counter_sum, lognormal_identical_rho, lognormal_identical_tvar,
                            lognormal_identical_var, lognormal_phi_minimizer, lognormal_root_set,
                            lognormal_tvar_counter, lognormal_tvar_terms, lognormal_var_counter,
                            mixed_normal_portfolio_rho, rho_counter_sum, tvar_counter_sum, var_counter_sum,
                            wt_counter_sum)
from .dependence import (AggregatePosition, Direction, DispersiveVerdict, Leg, aggregate_quantile,
                         check_dispersive, comonotonic_rho, counter_sum_quantile, frechet_lower, frechet_upper)
from .distortion import (IDENTITY, Distortion, Dual, Identity, Mixture, PiecewiseLinear, TVaRCap, VaRIndicator,
                         WangTransform, continuity_class, decompose, dual, jump_set)
from .distributions import (Distribution, Empirical, Laplace, Logistic, LogNormal, Normal, StudentT, Uniform,
                            load_empirical_csv)
from .errors import (ApplicabilityError, ConvergenceError, LevelOutOfRangeError, NotFiniteError, NumericalError,
                     RiskDistError, SpecParseError)
from .oracle import OracleSample, empirical_quantile, empirical_rho, grid_sample, xside_rho
from .quadrature import QuadratureConfig
from .risk_measures import MeasureResult, expectation, ltvar, rho, tvar, var, wang_measure
from .specs import parse_distortion, parse_distribution

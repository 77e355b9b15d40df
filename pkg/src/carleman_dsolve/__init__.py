"""Constructive solver for linear difference equations with analytic coefficients."""

__version__ = "0.1.0"

from .carleman import CarlemanSequence, ClassDiagnostics, WeightValue, diagnose_class, log_weight, weight_eval
from .errors import (AccuracyWarning, CacheBudgetError, CarlemanError, ConvergenceError, DomainError,
                     ExpensiveComputationWarning, GrowthConditionWarning, InvalidInputError, InvalidParamsError,
                     NoSolutionError, UnderflowError, UnsupportedProblemError, ValidationError)
from .extension import AlmostAnalyticExtension, DbarCheck, build_extension, dbar_check
from .funcmodel import (AnalyticHandle, GridSpec, Jet, constant, derivative_via_cauchy, exp_i, exp_linear, expexp,
                        handle_from_descriptor, log_scale_eval, polynomial, rational, trig)
from .solver import (DerivedCoefficients, DifferenceProblem, RecurrenceCache, SeriesSolution, SolveOptions,
                     ValidationReport, compute_Na, derive_coefficients, g_recurrence_eval, h_recurrence_eval,
                     oracle_constant_coeff, residual, solve, split_rhs, sum_series, validate_problem)
from .splitting import SplitPair, SplitParams, decay_check, split, split_sum_check

__all__ = [name for name in dir() if not name.startswith("_")]

"""Small-time heat content for weights singular at the boundary."""

from .asymptotics import (FitResult, SeriesTemplate, build_log_template, build_template,
                          compare, custom_template, fit_series)
from .errors import (ConvergenceError, DomainError, FitError, HeatContentError,
                     IllConditionedWarning, IntegrationWarning, PoleError, TemplateError)
from .heat_content import (CutoffFunction, QSample, bump_cutoff, q_ball, q_ball_eigen, q_grid,
                           q_halfline, q_interval)
from .invariants import (BetaTriple, BoundaryGeometry, EpsilonTable, ball_geometry,
                         beta_boundary, epsilon_table, interval_geometry, solve_epsilon)
from .kernels1d import Domain1D, image_count, kernel
from .quadrature import integrate_1d, integrate_2d
from .special_fns import AlphaPair, ball_b_coeffs, c_coef, log_case_constant, q_integral

__version__ = "0.1.0"

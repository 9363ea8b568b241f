"""Exception and warning types shared across the package."""


class HeatContentError(Exception):
    """Base class for all package errors."""


class DomainError(HeatContentError, ValueError):
    """An argument lies outside the region where the operation is defined."""


class PoleError(HeatContentError, ValueError):
    """Evaluation requested at (or too close to) a pole."""


class ConvergenceError(HeatContentError, RuntimeError):
    """A numerical procedure could not meet its tolerance."""


class TemplateError(HeatContentError, ValueError):
    """A series template cannot be built or does not match its data."""


class FitError(HeatContentError, ValueError):
    """A least squares fit was requested on unusable data."""


class IntegrationWarning(RuntimeWarning):
    """Quadrature stopped at its level cap without meeting tolerance."""


class IllConditionedWarning(RuntimeWarning):
    """The scaled design matrix of a fit is close to singular."""

"""Log-log growth fits of measured constants."""

import logging

import numpy as np
from pydantic import Field
from scipy import stats

from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import MFCZInvalidParameter


logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4


class GrowthFit(MFCZBaseModel):
    """Fit of log(value) = exponent * log(variable) + log(constant)."""

    variable: str = Field(title="variable", description="Sweep variable, N or 2^j")
    exponent: float = Field(title="exponent", description="Fitted slope")
    constant: float = Field(title="constant", description="Fitted multiplicative constant")
    r_squared: float = Field(title="r_squared", description="Coefficient of determination")
    num_points: int = Field(title="num_points", description="Number of fitted points")
    degenerate: bool = Field(
        default=False, title="degenerate", description="True if the sweep variable has no spread"
    )
    envelope: float | None = Field(
        default=None, title="envelope", description="Exponent of the theoretical bound"
    )
    envelope_constant: float | None = Field(
        default=None,
        title="envelope_constant",
        description="Smallest C with value <= C variable^envelope over the sweep",
    )


def fit_growth(variable_values, values, variable="N", envelope=None, base=np.e) -> GrowthFit:
    """Fit values ~ constant * variable^exponent on log-log axes.

    Parameters
    ----------
    variable_values : array-like
        Positive sweep values.
    values : array-like
        Positive measured values.
    variable : str
    envelope : float | None
        Exponent of the comparison bound; also reports the smallest constant C such that
        every value is at most C * variable^envelope.
    base : float
        Logarithm base. The slope does not depend on it; use 2 with variable = 2^j.

    """
    x = np.asarray(variable_values, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.size < MIN_FIT_POINTS:
        raise MFCZInvalidParameter(
            f"a growth fit needs at least {MIN_FIT_POINTS} paired points: {x.size}"
        )
    if np.any(x <= 0) or np.any(y <= 0):
        raise MFCZInvalidParameter("growth fits need positive values")
    log_x = np.log(x) / np.log(base)
    log_y = np.log(y) / np.log(base)
    envelope_constant = None if envelope is None else float(np.max(y / x**envelope))
    if np.ptp(log_x) == 0:
        logger.warning("Degenerate growth fit: the sweep variable %s has no spread", variable)
        return GrowthFit(
            variable=variable,
            exponent=float("nan"),
            constant=float(np.exp(np.mean(np.log(y)))),
            r_squared=float("nan"),
            num_points=x.size,
            degenerate=True,
            envelope=envelope,
            envelope_constant=envelope_constant,
        )
    if np.ptp(log_y) == 0:
        slope, intercept, r_squared = 0.0, float(log_y[0]), 1.0
    else:
        result = stats.linregress(log_x, log_y)
        slope, intercept, r_squared = result.slope, result.intercept, result.rvalue**2
    return GrowthFit(
        variable=variable,
        exponent=float(slope),
        constant=float(base**intercept),
        r_squared=float(r_squared),
        num_points=x.size,
        envelope=envelope,
        envelope_constant=envelope_constant,
    )

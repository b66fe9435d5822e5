"""Growth exponents in N against which measured norms are compared."""

import numpy as np
import pandas as pd
from pydantic import Field

from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import MFCZInvalidParameter


class ExponentEnvelope(MFCZBaseModel):
    """An exponent e of a bound C N^e."""

    name: str = Field(title="name", description="Which bound the exponent belongs to")
    exponent: float = Field(title="exponent", description="Exponent of N")
    interesting: bool = Field(
        title="interesting",
        description="True when the exponent beats the trivial exponent 1",
    )


def _inverse(p):
    return 0.0 if np.isinf(p) else 1.0 / p


def unweighted_exponent(p) -> float:
    """|1/p - 1/2|, the L^p growth exponent of multi-frequency CZ operators."""
    if p < 1:
        raise MFCZInvalidParameter(f"p must be >= 1: {p}")
    return abs(_inverse(p) - 0.5)


def weighted_exponent(p, t, s) -> float:
    """gamma = t p / (s min{2, s}) + |1/2 - 1/s| for weights in RH_{t'} and A_{p/s}."""
    _check_weighted(p, t, s)
    return t * p / (s * min(2.0, s)) + abs(0.5 - 1.0 / s)


def corollary_exponent(p, t, s) -> float:
    """t p / (2 s) + (1/2 - 1/s), stated for s in [2, p)."""
    _check_weighted(p, t, s)
    if not 2 <= s < p:
        raise MFCZInvalidParameter(f"this exponent needs 2 <= s < p: s={s}, p={p}")
    return t * p / (2 * s) + (0.5 - 1.0 / s)


def arithmetic_exponent(p, t, s) -> float:
    """t p / s^2 + |1/2 - 1/s|, available when theta is an arithmetic progression."""
    _check_weighted(p, t, s)
    return t * p / s**2 + abs(0.5 - 1.0 / s)


def fefferman_stein_exponent(p, t, s) -> float:
    """(t p / s) max{1/2, 1/s}."""
    _check_weighted(p, t, s)
    return t * p / s * max(0.5, 1.0 / s)


def pointwise_exponent(s) -> float:
    """|1/s - 1/2|, the growth of the sharp-function domination constant."""
    if not s > 1:
        raise MFCZInvalidParameter(f"s must be > 1: {s}")
    return abs(1.0 / s - 0.5)


TRIVIAL_EXPONENT = 1.0


def _check_weighted(p, t, s):
    if not (p > 1 and t >= 1 and s >= 1):
        raise MFCZInvalidParameter(f"invalid exponents p={p}, t={t}, s={s}")


def envelope_table(p, t, s) -> pd.DataFrame:
    """Return every available exponent for (p, t, s) with the ``interesting`` flag."""
    entries = [
        ("unweighted", unweighted_exponent(p)),
        ("weighted", weighted_exponent(p, t, s)),
        ("arithmetic", arithmetic_exponent(p, t, s)),
        ("fefferman_stein", fefferman_stein_exponent(p, t, s)),
        ("trivial", TRIVIAL_EXPONENT),
    ]
    if 2 <= s < p:
        entries.insert(2, ("corollary", corollary_exponent(p, t, s)))
    rows = [
        ExponentEnvelope(name=name, exponent=value, interesting=value < TRIVIAL_EXPONENT).dict()
        for name, value in entries
    ]
    return pd.DataFrame(rows)

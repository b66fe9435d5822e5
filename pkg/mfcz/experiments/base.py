import abc
import logging
from dataclasses import dataclass, field

import numpy as np

from mfcz.exceptions import MFCZInvalidExperiment, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import TorusDomain
from mfcz.norms.growth import MIN_FIT_POINTS, fit_growth


logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    """Tables, scalar results and verdicts produced by an experiment."""

    tables: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


class ExperimentBase(abc.ABC):
    """Base class for pre-defined experiments.

    Subclasses declare NAME, ANCHOR (the claim the experiment checks), DEFAULTS (the complete
    flat parameter set with its types) and implement ``generate``.
    """

    NAME = ""
    ANCHOR = ""
    DEFAULTS = {}

    def validate(self, parameters: dict) -> dict:
        """Merge parameters into the defaults, coerce their types and check preconditions."""
        unknown = sorted(set(parameters) - set(self.DEFAULTS))
        if unknown:
            raise MFCZInvalidExperiment(
                f"unknown parameters for {self.NAME}: {unknown}; "
                f"accepted: {sorted(self.DEFAULTS)}"
            )
        params = dict(self.DEFAULTS)
        for key, value in parameters.items():
            params[key] = _coerce(key, self.DEFAULTS[key], value)
        try:
            self.check(params)
        except MFCZInvalidParameter as exc:
            raise MFCZInvalidParameter(f"{self.NAME}: {exc}") from exc
        return params

    def check(self, params: dict):
        """Raise MFCZInvalidParameter if params violate a module precondition."""

    @abc.abstractmethod
    def generate(self, params: dict, rng: np.random.Generator) -> ExperimentResult:
        """Run the experiment with validated params and the experiment's generator."""


def _coerce(key, default, value):
    if isinstance(default, list):
        items = value if isinstance(value, list) else [value]
        if not default:
            return items
        return [_coerce(key, default[0], x) for x in items]
    if isinstance(value, list):
        raise MFCZInvalidExperiment(f"parameter {key} takes a single value: {value}")
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise MFCZInvalidExperiment(f"parameter {key} must be true or false: {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if not isinstance(value, int) or isinstance(value, bool):
            raise MFCZInvalidExperiment(f"parameter {key} must be an integer: {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MFCZInvalidExperiment(f"parameter {key} must be a number: {value!r}")
        return float(value)
    return str(value)


def make_domain(dim, points_per_dim, side_length=2 * np.pi) -> TorusDomain:
    """Torus of the given size; the default side length puts the lattice on the integers."""
    try:
        return TorusDomain(dim=dim, side_length=side_length, points_per_dim=points_per_dim)
    except ValueError as exc:
        raise MFCZInvalidParameter(f"invalid grid: {exc}") from exc


def centered_lattice_theta(count, spacing, domain: TorusDomain) -> FrequencySet:
    """Arithmetic progression of lattice frequencies, step spacing, centered at the origin.

    In two dimensions the progression runs along the first axis.
    """
    indices = spacing * (np.arange(count) - count // 2)
    if np.max(np.abs(indices)) >= domain.points_per_dim // 2:
        raise MFCZInvalidParameter(
            f"{count} frequencies with spacing {spacing} leave the band of "
            f"{domain.points_per_dim} points"
        )
    values = indices * domain.frequency_spacing
    if domain.dim == 1:
        return FrequencySet(values)
    return FrequencySet(np.stack([values, np.zeros(count)], axis=-1), dim=2)


def random_lattice_theta(count, domain: TorusDomain, rng) -> FrequencySet:
    """count distinct lattice frequencies drawn from the central half of the band."""
    quarter = domain.points_per_dim // 4
    indices = np.sort(rng.choice(np.arange(-quarter, quarter), size=count, replace=False))
    return FrequencySet(indices * domain.frequency_spacing)


def clustered_lattice_theta(count, spacing, domain: TorusDomain) -> FrequencySet:
    """Pairs of adjacent lattice frequencies, the pairs spacing lattice steps apart."""
    pairs = (count + 1) // 2
    base = spacing * (np.arange(pairs) - pairs // 2)
    indices = np.sort(np.concatenate([base, base + 1]))[:count]
    if np.max(np.abs(indices)) >= domain.points_per_dim // 2:
        raise MFCZInvalidParameter(f"{count} clustered frequencies leave the band")
    return FrequencySet(indices * domain.frequency_spacing)


def check_sweep(values, name, minimum=1, min_length=1):
    if len(values) < min_length:
        raise MFCZInvalidParameter(f"{name} needs at least {min_length} values: {values}")
    if any(x < minimum for x in values):
        raise MFCZInvalidParameter(f"every value of {name} must be at least {minimum}: {values}")


def fit_or_none(variable_values, values, **kwargs):
    """Growth fit when there are enough positive points, otherwise None."""
    x = np.asarray(variable_values, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(keep) < MIN_FIT_POINTS:
        return None
    return fit_growth(x[keep], y[keep], **kwargs)

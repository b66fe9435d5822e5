"""Weights on the torus and the preset weight families."""

import logging

import numpy as np

from mfcz.common import WEIGHT_FLOOR
from mfcz.exceptions import MFCZInvalidParameter
from mfcz.grid.torus import GridFunction, TorusDomain, weight_values


logger = logging.getLogger(__name__)


class Weight:
    """Nonnegative weight sampled on a TorusDomain.

    Characteristics are evaluated on ``max(values, floor)``; ``floor_binds`` records whether
    the floor changed any value.
    """

    def __init__(self, domain: TorusDomain, values, floor=WEIGHT_FLOOR, name="weight"):
        values = weight_values(domain, np.asarray(values, dtype=float))
        if not np.any(values > 0):
            raise MFCZInvalidParameter("a weight must be positive somewhere")
        self._domain = domain
        self._raw = values
        self._floor = floor
        self._name = name
        self._floor_binds = bool(np.any(values < floor))
        if self._floor_binds:
            logger.warning(
                "Weight %s has %s values below the floor %.3g",
                name,
                int(np.count_nonzero(values < floor)),
                floor,
            )

    def __repr__(self):
        return f"Weight(name={self._name}, shape={self._raw.shape})"

    @property
    def domain(self) -> TorusDomain:
        return self._domain

    @property
    def name(self) -> str:
        return self._name

    @property
    def raw_values(self) -> np.ndarray:
        return self._raw

    @property
    def values(self) -> np.ndarray:
        """Floored values."""
        return np.maximum(self._raw, self._floor)

    @property
    def floor_binds(self) -> bool:
        return self._floor_binds

    @property
    def has_zeros(self) -> bool:
        return bool(np.any(self._raw == 0))

    def power(self, exponent):
        """Return the weight w^exponent, computed from the floored values."""
        with np.errstate(over="ignore"):
            values = self.values**exponent
        return Weight(self._domain, values, self._floor, f"{self._name}^{exponent:g}")

    def scaled(self, factor):
        if not factor > 0:
            raise MFCZInvalidParameter(f"weights scale by positive factors only: {factor}")
        return Weight(self._domain, self._raw * factor, self._floor, self._name)

    def to_grid_function(self) -> GridFunction:
        return GridFunction(self._domain, self._raw)


def constant_weight(domain: TorusDomain, value=1.0) -> Weight:
    return Weight(domain, np.full(domain.shape, float(value)), name=f"constant({value:g})")


def power_weight(domain: TorusDomain, exponent, center=None) -> Weight:
    """Return max(|x - c|, h)^exponent with |x - c| the torus distance; c defaults to the
    center of the torus.
    """
    center = [domain.side_length / 2] * domain.dim if center is None else list(center)
    offsets = [domain.torus_offset(x, c) for x, c in zip(domain.mesh(), center)]
    distance = np.maximum(np.sqrt(sum(x**2 for x in offsets)), domain.spacing)
    return Weight(domain, distance**exponent, name=f"power({exponent:g})")


def two_valued_weight(domain: TorusDomain, high, split=0.5, axis=0) -> Weight:
    """Return high on {x_axis < split L} and 1 elsewhere."""
    if not high > 0:
        raise MFCZInvalidParameter(f"the high value must be positive: {high}")
    coordinate = domain.mesh()[axis]
    values = np.where(coordinate < split * domain.side_length, float(high), 1.0)
    return Weight(domain, values, name=f"two_valued({high:g})")


def log_lipschitz_weight(domain: TorusDomain, rng, amplitude=1.0, modes=8) -> Weight:
    """Return exp(a u) with u a random trigonometric polynomial of low degree and
    Lipschitz constant a on the torus.
    """
    total = np.zeros(domain.shape)
    lipschitz = 0.0
    for _ in range(modes):
        degree = rng.integers(1, 5, size=domain.dim)
        frequency = degree * domain.frequency_spacing
        phase = rng.uniform(0, 2 * np.pi)
        coefficient = rng.standard_normal()
        total += coefficient * np.cos(sum(k * x for k, x in zip(frequency, domain.mesh())) + phase)
        lipschitz += abs(coefficient) * float(np.linalg.norm(frequency))
    return Weight(domain, np.exp(amplitude * total / lipschitz), name="log_lipschitz")

"""Periodic grids, grid functions, boxes and the discrete Fourier transform.

All spatial integrals in mfcz are computed by the grid quadrature
``integral(f) = sum(f) * h**n`` where ``h = L / M`` is the grid spacing.
The frequency lattice of a domain with side ``L`` is ``(2 pi / L) * Z**n``
restricted to ``M`` points per axis, stored in FFT order.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from pydantic import Field, validator

from mfcz.common import BOX_MEMBERSHIP_TOLERANCE, SNAP_WARNING_FRACTION
from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import (
    MFCZDimensionMismatch,
    MFCZInvalidParameter,
    MFCZResolutionError,
)


logger = logging.getLogger(__name__)


class TorusDomain(MFCZBaseModel):
    """Periodic box [0, L)^n sampled with M points per dimension."""

    dim: int = Field(title="dim", description="Spatial dimension, 1 or 2")
    side_length: float = Field(title="side_length", description="Period L", gt=0)
    points_per_dim: int = Field(title="points_per_dim", description="Samples M per axis")

    class Config:
        allow_mutation = False
        frozen = True

    @validator("dim")
    def check_dim(cls, dim):
        if dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2: {dim}")
        return dim

    @validator("points_per_dim")
    def check_points_per_dim(cls, points):
        if points < 2 or points % 2 != 0:
            raise ValueError(f"points_per_dim must be even and positive: {points}")
        return points

    @classmethod
    def from_frequency_spacing(cls, dim, frequency_spacing, points_per_dim):
        """Build a domain whose frequency lattice has the given spacing."""
        if frequency_spacing <= 0:
            raise MFCZInvalidParameter(f"frequency_spacing must be positive: {frequency_spacing}")
        return cls(
            dim=dim,
            side_length=2 * math.pi / frequency_spacing,
            points_per_dim=points_per_dim,
        )

    @property
    def spacing(self) -> float:
        return self.side_length / self.points_per_dim

    @property
    def frequency_spacing(self) -> float:
        return 2 * math.pi / self.side_length

    @property
    def shape(self) -> tuple:
        return (self.points_per_dim,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def measure(self) -> float:
        return self.side_length**self.dim

    @property
    def num_points(self) -> int:
        return self.points_per_dim**self.dim

    @property
    def max_frequency(self) -> float:
        """Largest absolute lattice frequency per axis."""
        return self.frequency_spacing * self.points_per_dim / 2

    def coordinates(self):
        """Return the 1D grid coordinates x_k = k * h."""
        return np.arange(self.points_per_dim) * self.spacing

    def mesh(self):
        """Return the coordinate arrays for every axis, each with the domain shape."""
        axes = [self.coordinates()] * self.dim
        return np.meshgrid(*axes, indexing="ij")

    def lattice_indices(self):
        """Return the integer lattice indices per axis in FFT order."""
        return np.fft.fftfreq(self.points_per_dim, d=1.0 / self.points_per_dim).round().astype(int)

    def frequencies(self):
        """Return the 1D lattice frequencies in FFT order."""
        return self.lattice_indices() * self.frequency_spacing

    def frequency_mesh(self):
        """Return lattice frequency arrays for every axis in FFT order."""
        axes = [self.frequencies()] * self.dim
        return np.meshgrid(*axes, indexing="ij")

    def snap_frequencies(self, points):
        """Snap frequency vectors to the nearest lattice point.

        Parameters
        ----------
        points : numpy.ndarray
            shape (N, dim)

        Returns
        -------
        tuple
            snapped frequencies with shape (N, dim) and integer lattice indices

        """
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        indices = np.rint(points / self.frequency_spacing).astype(int)
        half = self.points_per_dim // 2
        if np.any(indices < -half) or np.any(indices > half - 1):
            raise MFCZResolutionError(
                f"frequencies exceed the lattice band [-{half}, {half - 1}] * "
                f"{self.frequency_spacing}; increase points_per_dim"
            )
        snapped = indices * self.frequency_spacing
        max_shift = float(np.max(np.abs(snapped - points))) if len(points) else 0.0
        if max_shift > SNAP_WARNING_FRACTION * self.frequency_spacing:
            logger.warning(
                "Snapped frequencies to the lattice; max displacement=%.3g (lattice spacing %.3g)",
                max_shift,
                self.frequency_spacing,
            )
        return snapped, indices

    def fft_position(self, lattice_index):
        """Return the array position of a signed lattice index along one axis."""
        return int(lattice_index) % self.points_per_dim

    def torus_offset(self, coords, center):
        """Return coords - center wrapped to [-L/2, L/2)."""
        half = self.side_length / 2
        return np.mod(np.asarray(coords) - center + half, self.side_length) - half


class GridFunction:
    """Samples of a function on a TorusDomain.

    Spectral coefficients returned by :func:`dft` are also stored as a
    GridFunction, in FFT order.
    """

    def __init__(self, domain: TorusDomain, values):
        values = np.asarray(values)
        if values.dtype.kind in "biu":
            values = values.astype(float)
        if values.shape != domain.shape:
            raise MFCZDimensionMismatch(
                f"values shape {values.shape} does not match domain shape {domain.shape}"
            )
        self._domain = domain
        self._values = values

    def __repr__(self):
        return f"GridFunction(shape={self._values.shape}, dtype={self._values.dtype})"

    @classmethod
    def from_callable(cls, domain: TorusDomain, func):
        """Sample func(*mesh) on the domain."""
        return cls(domain, func(*domain.mesh()))

    @classmethod
    def constant(cls, domain: TorusDomain, value=1.0):
        return cls(domain, np.full(domain.shape, value))

    @classmethod
    def character(cls, domain: TorusDomain, frequency):
        """Return e^{i xi . x} sampled on the grid."""
        frequency = np.atleast_1d(np.asarray(frequency, dtype=float))
        if frequency.size != domain.dim:
            raise MFCZDimensionMismatch(f"frequency {frequency} has wrong dimension")
        phase = sum(xi * x for xi, x in zip(frequency, domain.mesh()))
        return cls(domain, np.exp(1j * phase))

    @property
    def domain(self) -> TorusDomain:
        return self._domain

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._values)

    def copy(self):
        return GridFunction(self._domain, self._values.copy())

    def abs(self):
        return GridFunction(self._domain, np.abs(self._values))

    def conj(self):
        return GridFunction(self._domain, np.conj(self._values))

    def with_values(self, values):
        """Return a new GridFunction on the same domain."""
        return GridFunction(self._domain, values)

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            if other.domain != self._domain:
                raise MFCZDimensionMismatch("grid functions live on different domains")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self._values + self._other_values(other))

    def __sub__(self, other):
        return self.with_values(self._values - self._other_values(other))

    def __mul__(self, other):
        return self.with_values(self._values * self._other_values(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self._values)


@dataclass(frozen=True)
class BoxPoints:
    """Grid points of a box, with coordinates unwrapped around the box center."""

    axis_indices: tuple
    coords: np.ndarray
    counts: tuple

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def gather(self, values: np.ndarray) -> np.ndarray:
        """Return the values at the box points, flattened in C order."""
        return values[np.ix_(*self.axis_indices)].reshape(-1)

    def scatter(self, shape, samples, fill=0.0):
        """Place samples back onto a full grid."""
        out = np.full(shape, fill, dtype=np.result_type(samples, type(fill)))
        out[np.ix_(*self.axis_indices)] = np.asarray(samples).reshape(self.counts)
        return out


@dataclass(frozen=True)
class Box:
    """Closed l-infinity ball on the torus."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(x) for x in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise MFCZInvalidParameter(f"box radius must be positive: {self.radius}")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def measure(self) -> float:
        """Lebesgue measure (2r)^n."""
        return (2 * self.radius) ** self.dim

    def dilate(self, factor: float):
        """Return the box with the same center and radius scaled by factor."""
        return Box(self.center, self.radius * factor)

    def points(self, domain: TorusDomain) -> BoxPoints:
        """Return the grid points whose torus distance to the center is at most the radius."""
        _check_box_dim(domain, self)
        tol = BOX_MEMBERSHIP_TOLERANCE * domain.spacing
        coords_1d = domain.coordinates()
        axis_indices = []
        axis_coords = []
        for center in self.center:
            offsets = domain.torus_offset(coords_1d, center)
            selected = np.nonzero(np.abs(offsets) <= self.radius + tol)[0]
            if selected.size == 0:
                raise MFCZResolutionError(
                    f"box {self} contains no grid points of spacing {domain.spacing}"
                )
            order = np.argsort(offsets[selected])
            selected = selected[order]
            axis_indices.append(selected)
            axis_coords.append(center + offsets[selected])

        mesh = np.meshgrid(*axis_coords, indexing="ij")
        coords = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        counts = tuple(len(x) for x in axis_indices)
        return BoxPoints(axis_indices=tuple(axis_indices), coords=coords, counts=counts)

    def mask(self, domain: TorusDomain) -> np.ndarray:
        """Return a boolean grid that is True inside the box."""
        pts = self.points(domain)
        return pts.scatter(domain.shape, np.ones(pts.size, dtype=bool), fill=False)

    def grid_measure(self, domain: TorusDomain) -> float:
        """Measure of the box under the grid quadrature."""
        return self.points(domain).size * domain.cell_volume


def _check_box_dim(domain, box):
    if box.dim != domain.dim:
        raise MFCZDimensionMismatch(f"box dimension {box.dim} != domain dimension {domain.dim}")


def dft(f: GridFunction) -> GridFunction:
    """Unitary discrete Fourier transform in FFT order."""
    return f.with_values(np.fft.fftn(f.values, norm="ortho"))


def idft(f_hat: GridFunction) -> GridFunction:
    """Inverse of :func:`dft`."""
    return f_hat.with_values(np.fft.ifftn(f_hat.values, norm="ortho"))


def check_exponent(p, allow_inf=True):
    """Raise MFCZInvalidParameter unless 1 <= p <= infinity."""
    if p is None or np.isnan(p) or p < 1 or (not allow_inf and np.isinf(p)):
        raise MFCZInvalidParameter(f"invalid Lebesgue exponent p={p}")


def _power_mean(values, p, weights, total):
    """(sum weights |values|^p / total)^(1/p), rescaled to avoid overflow."""
    abs_values = np.abs(values)
    peak = float(np.max(abs_values)) if abs_values.size else 0.0
    if peak == 0.0:
        return 0.0
    return peak * float(np.sum(weights * (abs_values / peak) ** p) / total) ** (1.0 / p)


def lp_norm(f: GridFunction, p) -> float:
    """Return (integral |f|^p)^(1/p); p = inf returns max |f|."""
    check_exponent(p)
    if np.isinf(p):
        return float(np.max(np.abs(f.values)))
    return _power_mean(f.values, p, f.domain.cell_volume, 1.0)


def weight_values(domain: TorusDomain, weight) -> np.ndarray:
    """Return a nonnegative weight array for domain from a Weight, GridFunction or array."""
    values = np.asarray(getattr(weight, "values", weight))
    if values.shape != domain.shape:
        raise MFCZDimensionMismatch(
            f"weight shape {values.shape} does not match domain shape {domain.shape}"
        )
    if np.iscomplexobj(values) or np.any(values < 0) or not np.all(np.isfinite(values)):
        raise MFCZInvalidParameter("weights must be finite and nonnegative")
    return values


def lp_norm_w(f: GridFunction, p, weight) -> float:
    """Return (integral |f|^p w)^(1/p); p = inf returns the sup of |f| where w > 0."""
    check_exponent(p)
    w = weight_values(f.domain, weight)
    if np.isinf(p):
        support = w > 0
        return float(np.max(np.abs(f.values[support]))) if np.any(support) else 0.0
    return _power_mean(f.values, p, w * f.domain.cell_volume, 1.0)


def box_average(f: GridFunction, box: Box, p=1) -> float:
    """Return (average over the box of |f|^p)^(1/p) using the grid points in the box."""
    check_exponent(p)
    samples = box.points(f.domain).gather(f.values)
    if np.isinf(p):
        return float(np.max(np.abs(samples)))
    return _power_mean(samples, p, 1.0, samples.size)

"""Bounded planar frequency domains with signed boundary distance."""

import abc
import logging

import numpy as np

from mfcz.data_models import MFCZEnum
from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter
from mfcz.grid.torus import TorusDomain


logger = logging.getLogger(__name__)


def _far_offsets(lower, upper, center):
    """Per-axis offset of the box point farthest from center."""
    center = np.asarray(center)
    return np.maximum(np.abs(np.asarray(lower) - center), np.abs(np.asarray(upper) - center))


def _near_offsets(lower, upper, center):
    """Per-axis offset of the box point nearest to center."""
    center = np.asarray(center)
    return np.maximum(0.0, np.maximum(np.asarray(lower) - center, center - np.asarray(upper)))


class PlanarDomain(abc.ABC):
    """Bounded open set in the plane described by its signed distance to the boundary.

    The signed distance is positive inside, negative outside and 1-Lipschitz.
    """

    @abc.abstractmethod
    def signed_distance(self, xi1, xi2):
        """Return d(xi, boundary) inside and -d(xi, boundary) outside."""

    @abc.abstractmethod
    def box_distance(self, lower, upper):
        """Return d(box, boundary) for boxes [lower, upper] inside the domain.

        lower and upper hold one corner per row. Boxes that leave the domain get a
        non-positive value.
        """

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """Preset name."""

    @property
    @abc.abstractmethod
    def extent(self) -> float:
        """Largest |xi|_inf of a point of the closure."""

    def contains(self, xi1, xi2):
        return self.signed_distance(xi1, xi2) > 0

    def lattice_distance(self, domain: TorusDomain) -> np.ndarray:
        """Signed distance at every lattice frequency, in FFT order."""
        if domain.dim != 2:
            raise MFCZDimensionMismatch("planar domains live on two-dimensional lattices")
        xi1, xi2 = domain.frequency_mesh()
        return self.signed_distance(xi1, xi2)

    def lipschitz_constant(self, domain: TorusDomain) -> float:
        """Largest difference quotient of the signed distance along lattice edges."""
        distance = self.lattice_distance(domain)
        quotients = [
            np.max(np.abs(np.diff(np.fft.fftshift(distance), axis=axis)))
            for axis in range(domain.dim)
        ]
        return float(max(quotients) / domain.frequency_spacing)

    def check_resolved(self, domain: TorusDomain):
        if self.extent >= domain.max_frequency - domain.frequency_spacing:
            raise MFCZInvalidParameter(
                f"{self.name} does not fit in the frequency band of the lattice "
                f"(extent {self.extent}, band {domain.max_frequency})"
            )


class Disk(PlanarDomain):
    """Open disk |xi - c| < R."""

    def __init__(self, radius=1.0, center=(0.0, 0.0)):
        if not radius > 0:
            raise MFCZInvalidParameter(f"radius must be positive: {radius}")
        self.radius = float(radius)
        self.center = tuple(float(x) for x in center)

    @property
    def name(self) -> str:
        return "disk"

    @property
    def extent(self) -> float:
        return self.radius + max(abs(x) for x in self.center)

    def signed_distance(self, xi1, xi2):
        return self.radius - np.hypot(xi1 - self.center[0], xi2 - self.center[1])

    def box_distance(self, lower, upper):
        far = _far_offsets(lower, upper, self.center)
        return self.radius - np.hypot(far[:, 0], far[:, 1])


class Square(PlanarDomain):
    """Open square |xi - c|_inf < a."""

    def __init__(self, half_side=1.0, center=(0.0, 0.0)):
        if not half_side > 0:
            raise MFCZInvalidParameter(f"half_side must be positive: {half_side}")
        self.half_side = float(half_side)
        self.center = tuple(float(x) for x in center)

    @property
    def name(self) -> str:
        return "square"

    @property
    def extent(self) -> float:
        return self.half_side + max(abs(x) for x in self.center)

    def signed_distance(self, xi1, xi2):
        q1 = np.abs(xi1 - self.center[0]) - self.half_side
        q2 = np.abs(xi2 - self.center[1]) - self.half_side
        outside = np.hypot(np.maximum(q1, 0), np.maximum(q2, 0))
        inside = np.minimum(np.maximum(q1, q2), 0)
        return -(outside + inside)

    def box_distance(self, lower, upper):
        far = _far_offsets(lower, upper, self.center)
        return self.half_side - np.max(far, axis=1)


class Annulus(PlanarDomain):
    """Open annulus r < |xi - c| < R."""

    def __init__(self, inner=0.5, outer=1.0, center=(0.0, 0.0)):
        if not 0 < inner < outer:
            raise MFCZInvalidParameter(f"need 0 < inner < outer: {inner}, {outer}")
        self.inner = float(inner)
        self.outer = float(outer)
        self.center = tuple(float(x) for x in center)

    @property
    def name(self) -> str:
        return "annulus"

    @property
    def extent(self) -> float:
        return self.outer + max(abs(x) for x in self.center)

    def signed_distance(self, xi1, xi2):
        radius = np.hypot(xi1 - self.center[0], xi2 - self.center[1])
        return np.minimum(self.outer - radius, radius - self.inner)

    def box_distance(self, lower, upper):
        far = _far_offsets(lower, upper, self.center)
        near = _near_offsets(lower, upper, self.center)
        return np.minimum(
            self.outer - np.hypot(far[:, 0], far[:, 1]),
            np.hypot(near[:, 0], near[:, 1]) - self.inner,
        )


class DomainPreset(MFCZEnum):
    """Planar domains available by name."""

    DISK = "disk", "Unit disk"
    SQUARE = "square", "Square [-1, 1]^2"
    ANNULUS = "annulus", "Annulus 1/2 < |xi| < 1"


def make_planar_domain(preset) -> PlanarDomain:
    match DomainPreset(preset):
        case DomainPreset.DISK:
            return Disk()
        case DomainPreset.SQUARE:
            return Square()
        case DomainPreset.ANNULUS:
            return Annulus()

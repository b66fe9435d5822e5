"""Gram systems of exponentials on boxes."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from mfcz.common import CLUSTERED_PAIR_THRESHOLD, GRAM_EIGENVALUE_FLOOR
from mfcz.data_models import MFCZEnum
from mfcz.exceptions import MFCZDimensionMismatch
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import Box, BoxPoints, TorusDomain


logger = logging.getLogger(__name__)


class Quadrature(MFCZEnum):
    """How Gram integrals are computed."""

    GRID = "grid", "Grid quadrature over the region's grid points"
    EXACT = "exact", "Closed-form Lebesgue integrals over the region"


def exponential_basis(theta: FrequencySet, coords: np.ndarray) -> np.ndarray:
    """Return the (P, N) matrix of e^{i xi_j . y} at the points coords with shape (P, dim)."""
    if coords.shape[-1] != theta.dim:
        raise MFCZDimensionMismatch("points and frequencies have different dimensions")
    return np.exp(1j * (coords @ theta.freqs.T))


def closed_form_gram(theta: FrequencySet, region: Box) -> np.ndarray:
    """Return the Lebesgue Gram matrix G[j, k] = int_region e^{i (xi_j - xi_k) . y} dy.

    Per axis the integral over [c - r, c + r] is (e^{i t b} - e^{i t a}) / (i t), evaluated as
    e^{i t c} * 2 r * sinc(t r / pi) so that t = 0 gives 2 r.
    """
    if region.dim != theta.dim:
        raise MFCZDimensionMismatch("region and frequencies have different dimensions")
    gram = np.ones((theta.size, theta.size), dtype=complex)
    for axis in range(theta.dim):
        diff = theta.freqs[:, axis][:, None] - theta.freqs[:, axis][None, :]
        center = region.center[axis]
        radius = region.radius
        gram *= np.exp(1j * diff * center) * 2 * radius * np.sinc(diff * radius / np.pi)
    np.fill_diagonal(gram, region.measure)
    return gram


@dataclass
class GramSystem:
    """Gram matrix of the exponentials of theta on a region, with a regularized inverse.

    gram[j, k] is the integral over the region of e^{i (xi_j - xi_k) . y}. Eigenvalues below
    ``GRAM_EIGENVALUE_FLOOR * measure`` are dropped from the inverse.
    """

    theta: FrequencySet
    region: Box
    gram: np.ndarray
    measure: float
    condition_estimate: float
    rank: int
    inverse: np.ndarray
    clustered_pairs: list

    @classmethod
    def from_matrix(cls, theta: FrequencySet, region: Box, gram: np.ndarray, measure: float):
        gram = (gram + gram.conj().T) / 2
        eigenvalues, eigenvectors = linalg.eigh(gram)
        floor = GRAM_EIGENVALUE_FLOOR * measure
        keep = eigenvalues > floor
        rank = int(np.count_nonzero(keep))
        kept_vectors = eigenvectors[:, keep]
        inverse = (kept_vectors / eigenvalues[keep]) @ kept_vectors.conj().T
        largest = float(eigenvalues[-1]) if len(eigenvalues) else 0.0
        condition = largest / max(float(eigenvalues[0]), floor) if rank else np.inf
        pairs = theta.clustered_pairs(region.radius, CLUSTERED_PAIR_THRESHOLD)
        if pairs:
            logger.debug("Gram system on %s has clustered frequency pairs %s", region, pairs)
        return cls(
            theta=theta,
            region=region,
            gram=gram,
            measure=measure,
            condition_estimate=condition,
            rank=rank,
            inverse=inverse,
            clustered_pairs=pairs,
        )

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.theta.size

    def quadratic_form(self, basis_rows: np.ndarray) -> np.ndarray:
        """Return e(x)^* G^{-1} e(x) for each row e(x) of basis_rows (shape (P, N))."""
        applied = basis_rows @ self.inverse.T
        return np.real(np.sum(basis_rows.conj() * applied, axis=1))


def build_gram(
    theta: FrequencySet,
    region: Box,
    domain: TorusDomain | None = None,
    quadrature=Quadrature.GRID,
    points: BoxPoints | None = None,
):
    """Build the GramSystem of theta on region.

    Parameters
    ----------
    theta : FrequencySet
    region : Box
    domain : TorusDomain | None
        Required for grid quadrature.
    quadrature : Quadrature
    points : BoxPoints | None
        Precomputed grid points of the region.

    Returns
    -------
    GramSystem

    """
    if quadrature == Quadrature.EXACT:
        gram = closed_form_gram(theta, region)
        return GramSystem.from_matrix(theta, region, gram, region.measure)

    if domain is None:
        raise MFCZDimensionMismatch("grid quadrature needs a domain")
    if points is None:
        points = region.points(domain)
    cell_volume = domain.cell_volume
    basis = exponential_basis(theta, points.coords)
    gram = cell_volume * (basis.T @ basis.conj())
    return GramSystem.from_matrix(theta, region, gram, points.size * cell_volume)


@dataclass(frozen=True)
class SpanElement:
    """phi(x) = sum_j c_j e^{i xi_j . x}."""

    theta: FrequencySet
    coefficients: np.ndarray
    objective: float | None = None
    iterations: int = 0

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        """Evaluate at points with shape (P, dim)."""
        coords = np.asarray(coords, dtype=float).reshape(-1, self.theta.dim)
        return exponential_basis(self.theta, coords) @ self.coefficients

    def on_grid(self, domain: TorusDomain) -> np.ndarray:
        """Evaluate at every grid point of domain."""
        coords = np.stack([m.reshape(-1) for m in domain.mesh()], axis=-1)
        return self.evaluate(coords).reshape(domain.shape)

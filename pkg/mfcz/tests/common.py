"""Shared helpers for the mfcz test suite."""

import numpy as np

from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import GridFunction, TorusDomain

TEST_SEED = 20231018


def make_test_domain(points_per_dim=64, dim=1, side_length=2 * np.pi) -> TorusDomain:
    return TorusDomain(dim=dim, side_length=side_length, points_per_dim=points_per_dim)


def random_grid_function(domain: TorusDomain, rng, complex_values=False) -> GridFunction:
    values = rng.standard_normal(domain.shape)
    if complex_values:
        values = values + 1j * rng.standard_normal(domain.shape)
    return GridFunction(domain, values)


def lattice_theta(indices, domain: TorusDomain) -> FrequencySet:
    """Frequency set at the given integer lattice indices of a 1D domain."""
    return FrequencySet(np.asarray(indices, dtype=float) * domain.frequency_spacing)


def trig_polynomial(domain: TorusDomain, theta: FrequencySet, coefficients) -> GridFunction:
    """sum_j c_j e^{i xi_j x} on the grid."""
    total = np.zeros(domain.shape, dtype=complex)
    for coefficient, freq in zip(coefficients, theta.freqs):
        total += coefficient * GridFunction.character(domain, freq).values
    return GridFunction(domain, total)


def assert_close(actual, expected, rtol=1e-10, atol=1e-12):
    np.testing.assert_allclose(actual, expected, rtol=rtol, atol=atol)

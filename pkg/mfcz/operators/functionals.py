"""Pointwise l^q functionals built from frequency modulations and frequency projections."""

import logging

import numpy as np

from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import GridFunction, dft, idft
from mfcz.operators.symbols import jump_counts


logger = logging.getLogger(__name__)


def _check_q(q):
    if q is None or np.isnan(q) or q < 1:
        raise MFCZInvalidParameter(f"q must be in [1, inf]: {q}")


def lq_aggregate(magnitudes, q) -> np.ndarray:
    """Return (sum_j |g_j|^q)^(1/q) pointwise for a stack of arrays; q = inf gives the max."""
    stack = np.abs(np.asarray(magnitudes))
    if np.isinf(q):
        return stack.max(axis=0)
    peak = stack.max(axis=0)
    safe = np.where(peak > 0, peak, 1.0)
    return peak * np.sum((stack / safe) ** q, axis=0) ** (1.0 / q)


def modulated_lq_functional(operator, theta: FrequencySet, f: GridFunction, q) -> GridFunction:
    """Return (sum_j |T(e^{i theta_j . x} f)|^q)^(1/q).

    The frequencies are snapped to the lattice of f's domain so the modulations are periodic.
    """
    _check_q(q)
    if theta.dim != f.domain.dim:
        raise MFCZDimensionMismatch("frequency set and function dimensions differ")
    snapped = theta.on_lattice(f.domain)
    outputs = [
        operator.apply(f * GridFunction.character(f.domain, freq)).values for freq in snapped.freqs
    ]
    return GridFunction(f.domain, lq_aggregate(outputs, q))


def frequency_bins(theta: FrequencySet | None, domain) -> np.ndarray:
    """Label every lattice frequency with the interval of the partition generated by theta.

    Bin 0 is (-inf, xi_1), bin j is [xi_j, xi_{j+1}) and bin N is [xi_N, inf); a lattice point
    equal to xi_j belongs to the interval on its right. theta None gives a single bin.
    """
    if domain.dim != 1:
        raise MFCZDimensionMismatch("frequency bins are defined in one dimension")
    if theta is None:
        return np.zeros(domain.shape, dtype=int)
    return jump_counts(domain.frequencies(), theta, domain)


def rubio_functional(theta: FrequencySet | None, f: GridFunction, q) -> GridFunction:
    """Return (sum over intervals w of |F^-1[1_w F f]|^q)^(1/q) for the partition from theta."""
    _check_q(q)
    bins = frequency_bins(theta, f.domain)
    spectrum = dft(f)
    outputs = []
    for label in np.unique(bins):
        outputs.append(idft(spectrum * (bins == label)).values)
    return GridFunction(f.domain, lq_aggregate(outputs, q))

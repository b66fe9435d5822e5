"""Fourier multiplier symbols evaluated on the frequency lattice of a TorusDomain.

A symbol evaluator has the signature ``func(xi_grids, domain)`` where ``xi_grids`` holds one
frequency array per axis in FFT order, as returned by ``TorusDomain.frequency_mesh``.
"""

import logging

import numpy as np
import pandas as pd
from pydantic import Field
from scipy import optimize, special

from mfcz.data_models import MFCZBaseModel, MFCZEnum
from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet, dist_to_set_grid
from mfcz.grid.torus import TorusDomain


logger = logging.getLogger(__name__)


class SymbolKind(MFCZEnum):
    """Families of symbols built by mfcz."""

    IDENTITY = "identity", "m = 1"
    ZERO = "zero", "m = 0"
    MF_HILBERT = "mf_hilbert", "Alternating +-1 between consecutive frequencies"
    HORMANDER = "hormander", "Smooth symbol with d(xi, Theta)^-|alpha| derivative decay"
    BUMP = "bump", "Smooth bump adapted to a frequency cube"
    CONVOLUTION = "convolution", "Transform of a convolution kernel"
    BOCHNER_RIESZ = "bochner_riesz", "Generalized Bochner-Riesz symbol of a planar domain"
    CUSTOM = "custom", "User-supplied evaluator"


class HormanderProfile(MFCZEnum):
    """Profiles g(u) of the Hormander symbols; every profile has |g^(k)(u)| <= C |u|^-k."""

    ODD = "odd", "Smoothed sign u / sqrt(u^2 + l^2)"
    BUMP = "bump", "Lorentzian l^2 / (u^2 + l^2)"
    OSCILLATING = "oscillating", "cos(log(1 + |u| / l))"


class Symbol:
    """A bounded function on the frequency lattice, with its frequency set and kind."""

    def __init__(self, evaluator, kind=SymbolKind.CUSTOM, theta=None, name=None):
        self._evaluator = evaluator
        self._kind = kind
        self._theta = theta
        self._name = name or kind.value
        self._cache = {}

    def __repr__(self):
        return f"Symbol(name={self._name}, kind={self._kind.value})"

    @property
    def kind(self) -> SymbolKind:
        return self._kind

    @property
    def theta(self) -> FrequencySet | None:
        return self._theta

    @property
    def name(self) -> str:
        return self._name

    def evaluate(self, domain: TorusDomain) -> np.ndarray:
        """Return the symbol on the lattice of domain in FFT order."""
        values = self._cache.get(domain)
        if values is None:
            values = np.asarray(self._evaluator(domain.frequency_mesh(), domain))
            values = np.broadcast_to(values, domain.shape).astype(complex)
            values.setflags(write=False)
            self._cache[domain] = values
        return values

    def sup_norm(self, domain: TorusDomain) -> float:
        return float(np.max(np.abs(self.evaluate(domain))))

    def conj(self):
        """Return the symbol of the adjoint operator."""
        return Symbol(
            lambda xi, domain: np.conj(self.evaluate(domain)),
            kind=self._kind,
            theta=self._theta,
            name=f"conj({self._name})",
        )

    def shifted(self, shift):
        """Return xi -> m(xi - shift), the symbol of the modulated operator."""
        shift = np.atleast_1d(np.asarray(shift, dtype=float))

        def evaluator(xi, domain):
            return self._evaluator([x - s for x, s in zip(xi, shift)], domain)

        return Symbol(evaluator, kind=self._kind, theta=self._theta, name=f"{self._name}-shift")

    def scaled(self, factor):
        return Symbol(
            lambda xi, domain: factor * self.evaluate(domain),
            kind=self._kind,
            theta=self._theta,
            name=self._name,
        )


def identity_symbol():
    return Symbol(lambda xi, domain: np.ones(domain.shape), kind=SymbolKind.IDENTITY)


def zero_symbol():
    return Symbol(lambda xi, domain: np.zeros(domain.shape), kind=SymbolKind.ZERO)


def _as_increasing_1d(theta):
    if isinstance(theta, FrequencySet):
        if theta.dim != 1:
            raise MFCZDimensionMismatch("the multi-frequency Hilbert symbol is one-dimensional")
        return theta
    values = np.asarray(theta, dtype=float).reshape(-1)
    if values.size == 0 or np.any(np.diff(values) <= 0):
        raise MFCZInvalidParameter(f"frequencies must be strictly increasing: {values}")
    return FrequencySet(values)


def jump_counts(xi, theta: FrequencySet, domain: TorusDomain) -> np.ndarray:
    """Return the number of frequencies <= xi, so lattice points equal to a jump count it."""
    tol = 1e-9 * domain.frequency_spacing
    return np.searchsorted(theta.values_1d(), xi + tol, side="right")


def mf_hilbert_symbol(theta) -> Symbol:
    """Return m = -1 below xi_1, (-1)^(j+1) on (xi_j, xi_{j+1}) and (-1)^(N+1) above xi_N.

    A lattice frequency equal to some xi_j takes the value to its right.
    """
    theta = _as_increasing_1d(theta)

    def evaluator(xi, domain):
        if domain.dim != 1:
            raise MFCZDimensionMismatch("the multi-frequency Hilbert symbol is one-dimensional")
        counts = jump_counts(xi[0], theta, domain)
        return np.where(counts % 2 == 1, 1.0, -1.0)

    return Symbol(evaluator, kind=SymbolKind.MF_HILBERT, theta=theta, name="mf_hilbert")


def bump_profile(t):
    """(1 - t^2)^3 on [-1, 1], zero outside."""
    t = np.asarray(t, dtype=float)
    return np.where(np.abs(t) < 1, (1 - t**2) ** 3, 0.0)


def plateau_profile(t, inner=0.5, outer=1.0):
    """Return 1 for t <= inner, 0 for t >= outer, and a smooth monotone step in between.

    The step is the normalized integral of the (1 - u^2)^3 bump, which is the regularized
    incomplete beta function I_x(4, 4).
    """
    s = np.clip((np.asarray(t, dtype=float) - inner) / (outer - inner), 0.0, 1.0)
    return 1.0 - special.betainc(4, 4, s)


def _profile_values(profile, u, scale):
    match profile:
        case HormanderProfile.ODD:
            return u[..., 0] / np.sqrt(np.sum(u**2, axis=-1) + scale**2)
        case HormanderProfile.BUMP:
            return scale**2 / (np.sum(u**2, axis=-1) + scale**2)
        case HormanderProfile.OSCILLATING:
            return np.cos(np.log1p(np.sqrt(np.sum(u**2, axis=-1)) / scale))
    raise MFCZInvalidParameter(f"unknown profile {profile}")


def hormander_symbol(theta: FrequencySet, profile=HormanderProfile.ODD, scale=None) -> Symbol:
    """Return m(xi) = sum_j psi(|xi - xi_j| / sigma_j) g(xi - xi_j).

    sigma_j is half the distance from xi_j to its nearest neighbour and psi is the
    (1 - t^2)^3 bump, so the pieces have disjoint supports. With one frequency no
    localization is applied and m is the classical symbol g(xi - xi_1).

    Parameters
    ----------
    theta : FrequencySet
    profile : HormanderProfile
    scale : float | None
        Length l of the profile. Defaults to sigma_j / 2, or to four lattice spacings when
        theta has one frequency.

    """
    sigmas = theta.min_gaps() / 2

    def evaluator(xi, domain):
        if domain.dim != theta.dim:
            raise MFCZDimensionMismatch("symbol and domain dimensions differ")
        points = np.stack(xi, axis=-1)
        values = np.zeros(domain.shape)
        for freq, sigma in zip(theta.freqs, sigmas):
            u = points - freq
            if np.isinf(sigma):
                length = scale or 4 * domain.frequency_spacing
                values = values + _profile_values(profile, u, length)
            else:
                length = scale or sigma / 2
                radius = np.sqrt(np.sum(u**2, axis=-1)) / sigma
                values = values + bump_profile(radius) * _profile_values(profile, u, length)
        return values

    return Symbol(evaluator, kind=SymbolKind.HORMANDER, theta=theta, name=f"hormander-{profile}")


class DerivativeCheck(MFCZBaseModel):
    """Finite-difference check of |D^alpha m(xi)| <= C d(xi, Theta)^-|alpha|."""

    constants: list[float] = Field(
        title="constants", description="Measured C for |alpha| = 1, 2, ..."
    )
    min_distance: float = Field(
        title="min_distance", description="Lattice points closer than this to Theta are skipped"
    )


def _centered_derivatives(values, spacing, max_order):
    """Return max over axes-multi-indices of |D^alpha values| for each order, centered order."""
    dim = values.ndim
    current = [values]
    by_order = []
    for _ in range(max_order):
        current = [np.gradient(v, spacing, axis=a) for v in current for a in range(dim)]
        by_order.append(np.max(np.abs(np.stack(current)), axis=0))
    return by_order


def symbol_derivative_table(symbol: Symbol, domain: TorusDomain, max_order=2, bins=8):
    """Return the derivative check and a DataFrame of derivative sizes by distance to Theta.

    The table has one row per log-spaced distance bin with the largest |D^alpha m| in that bin
    (columns ``d_order<k>``) and the largest |D^alpha m| d^|alpha| (columns ``scaled<k>``).
    """
    theta = symbol.theta
    if theta is None:
        raise MFCZInvalidParameter("the symbol has no frequency set")
    spacing = domain.frequency_spacing
    values = np.fft.fftshift(symbol.evaluate(domain))
    mesh = [np.fft.fftshift(x) for x in domain.frequency_mesh()]
    distance = dist_to_set_grid(np.stack(mesh, axis=-1), theta)
    derivatives = _centered_derivatives(values, spacing, max_order)
    min_distance = 2 * max_order * spacing
    interior = np.ones(domain.shape, dtype=bool)
    for axis in range(domain.dim):
        index = [slice(None)] * domain.dim
        for edge in (slice(0, max_order), slice(-max_order, None)):
            index[axis] = edge
            interior[tuple(index)] = False
    valid = interior & (distance >= min_distance)
    constants = [
        float(np.max(d[valid] * distance[valid] ** (k + 1))) if np.any(valid) else 0.0
        for k, d in enumerate(derivatives)
    ]
    top = float(distance[valid].max()) if np.any(valid) else 0.0
    edges = np.geomspace(min_distance, max(top, min_distance * 2), bins + 1)
    edges[-1] *= 1 + 1e-12
    rows = []
    for low, high in zip(edges[:-1], edges[1:]):
        selected = valid & (distance >= low) & (distance < high)
        if not np.any(selected):
            continue
        row = {"distance_low": low, "distance_high": high}
        for k, d in enumerate(derivatives, start=1):
            row[f"d_order{k}"] = float(np.max(d[selected]))
            row[f"scaled{k}"] = float(np.max(d[selected] * distance[selected] ** k))
        rows.append(row)
    check = DerivativeCheck(constants=constants, min_distance=min_distance)
    return check, pd.DataFrame(rows)


def cube_symbol(center, radius, inner=0.5) -> Symbol:
    """Smooth bump equal to 1 on the inner fraction of the l-infinity cube and 0 outside it."""
    center = np.atleast_1d(np.asarray(center, dtype=float))

    def evaluator(xi, domain):
        if len(center) != domain.dim:
            raise MFCZDimensionMismatch("cube and domain dimensions differ")
        t = np.max(np.stack([np.abs(x - c) for x, c in zip(xi, center)]), axis=0) / radius
        return plateau_profile(t, inner, 1.0)

    theta = FrequencySet(center[None, :], dim=len(center))
    return Symbol(evaluator, kind=SymbolKind.BUMP, theta=theta, name="cube-bump")


def _bump_terms(radii, t, n, decay):
    u = np.outer(t, radii)
    return np.sum(u ** (n + 1) / (1 + u) ** decay, axis=1)


def bump_constant(radii, n, decay=None, points=4000):
    """Return sup_{t > 0} sum_j (r_j t)^(n+1) / (1 + r_j t)^M with M = decay (default n + 2).

    The sup is located on a log grid of t and refined with a bounded scalar minimization in
    log t around the best grid point.
    """
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if radii.size == 0 or np.any(radii <= 0):
        raise MFCZInvalidParameter("radii must be positive")
    decay = n + 2 if decay is None else decay
    if decay <= n + 1:
        raise MFCZInvalidParameter(f"decay M={decay} must exceed n + 1 = {n + 1}")
    log_t = np.linspace(np.log(1e-4 / radii.max()), np.log(1e4 / radii.min()), points)
    values = _bump_terms(radii, np.exp(log_t), n, decay)
    best = int(np.argmax(values))
    low, high = log_t[max(best - 1, 0)], log_t[min(best + 1, points - 1)]
    refined = optimize.minimize_scalar(
        lambda x: -_bump_terms(radii, np.exp([x]), n, decay)[0],
        bounds=(low, high),
        method="bounded",
    )
    return float(max(values[best], -refined.fun))

"""Best approximation of f * 1_Q from span{e^{i xi_j . y}} on a target box."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from mfcz.common import (
    BOX_MEMBERSHIP_TOLERANCE,
    CLUSTERED_PAIR_THRESHOLD,
    DEFAULT_IRLS_MAX_ITER,
    ORTHOGONALITY_TOLERANCE,
)
from mfcz.exceptions import (
    MFCZConvergenceError,
    MFCZDimensionMismatch,
    MFCZGramError,
    MFCZInvalidParameter,
)
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import Box, BoxPoints, GridFunction, TorusDomain
from mfcz.span.gram import GramSystem, SpanElement, build_gram, exponential_basis


logger = logging.getLogger(__name__)


@dataclass
class ProjectionFrame:
    """Grid points of a target box, the sub-box Q inside it and the exponentials there."""

    domain: TorusDomain
    theta: FrequencySet
    box: Box
    target: Box
    points: BoxPoints
    inside: np.ndarray
    basis: np.ndarray

    @classmethod
    def build(cls, domain: TorusDomain, theta: FrequencySet, box: Box, target: Box | None = None):
        if theta.dim != domain.dim:
            raise MFCZDimensionMismatch("frequency set and domain dimensions differ")
        target = box if target is None else target
        points = target.points(domain)
        offsets = domain.torus_offset(points.coords, np.asarray(box.center))
        tol = BOX_MEMBERSHIP_TOLERANCE * domain.spacing
        inside = np.all(np.abs(offsets) <= box.radius + tol, axis=1)
        if not np.any(inside):
            raise MFCZDimensionMismatch(f"box {box} has no grid points inside target {target}")
        basis = exponential_basis(theta, points.coords)
        return cls(domain, theta, box, target, points, inside, basis)

    @property
    def cell_volume(self) -> float:
        return self.domain.cell_volume

    @property
    def target_measure(self) -> float:
        return self.points.size * self.cell_volume

    @property
    def box_measure(self) -> float:
        return int(np.count_nonzero(self.inside)) * self.cell_volume

    def restricted(self, values: np.ndarray) -> np.ndarray:
        """Return f * 1_Q sampled at the target points."""
        samples = self.points.gather(values).astype(complex)
        samples[~self.inside] = 0.0
        return samples

    def gram(self) -> GramSystem:
        return build_gram(self.theta, self.target, self.domain, points=self.points)

    def lp_norm(self, samples: np.ndarray, p: float) -> float:
        """L^p norm over the target region of the given samples."""
        return float(np.sum(np.abs(samples) ** p) * self.cell_volume) ** (1.0 / p)


def _check_orthogonality(frame: ProjectionFrame, samples: np.ndarray, residual: np.ndarray):
    pairings = frame.cell_volume * (frame.basis.conj().T @ residual)
    scale = frame.cell_volume * np.linalg.norm(samples) * np.sqrt(frame.points.size)
    worst = float(np.max(np.abs(pairings))) if pairings.size else 0.0
    limit = ORTHOGONALITY_TOLERANCE * max(scale, np.finfo(float).tiny)
    if not np.isfinite(worst) or worst > limit:
        pairs = frame.theta.clustered_pairs(frame.target.radius, CLUSTERED_PAIR_THRESHOLD)
        raise MFCZGramError(
            f"projection on {frame.target} lost orthogonality "
            f"({worst:.3g} vs scale {scale:.3g}); "
            f"clustered pairs: {pairs}",
            clustered_pairs=pairs,
        )


def l2_projection_samples(frame: ProjectionFrame, samples: np.ndarray) -> np.ndarray:
    """Return the L^2(target) projection of samples onto the span, as values at the target
    points.

    The projection uses an orthonormal basis of the sampled exponentials, so the residual is
    orthogonal to every exponential up to rounding even when the Gram matrix is ill conditioned.
    """
    q, _ = linalg.qr(frame.basis, mode="economic")
    projected = q @ (q.conj().T @ samples)
    _check_orthogonality(frame, samples, samples - projected)
    return projected


def _least_squares(basis, samples, weights=None):
    if weights is None:
        coefficients, *_ = linalg.lstsq(basis, samples, lapack_driver="gelsd")
    else:
        root = np.sqrt(weights)
        coefficients, *_ = linalg.lstsq(
            root[:, None] * basis, root * samples, lapack_driver="gelsd"
        )
    return coefficients


def project_l2(
    f: GridFunction, theta: FrequencySet, box: Box, target: Box | None = None
) -> SpanElement:
    """Return phi in span{e^{i xi_j . y}} minimizing ||f 1_Q - phi|| in L^2(target).

    Parameters
    ----------
    f : GridFunction
    theta : FrequencySet
    box : Box
        The box Q on which f is kept.
    target : Box | None
        Region of the L^2 norm, Q when None.

    Returns
    -------
    SpanElement
        objective holds the L^2(target) norm of the residual.

    """
    frame = ProjectionFrame.build(f.domain, theta, box, target)
    samples = frame.restricted(f.values)
    coefficients = _least_squares(frame.basis, samples)
    residual = samples - frame.basis @ coefficients
    _check_orthogonality(frame, samples, residual)
    return SpanElement(theta, coefficients, objective=frame.lp_norm(residual, 2), iterations=1)


def ls_objective(frame: ProjectionFrame, samples, coefficients, s) -> float:
    """Return ||samples - basis c||_{L^s(target)}."""
    return frame.lp_norm(samples - frame.basis @ coefficients, s)


def irls_fit(basis, samples, s, cell_volume, max_iter, tol, initial=None):
    """Minimize sum |samples - basis c|^s by reweighted least squares with a line search.

    Returns coefficients, objective (sum of |r|^s times cell volume), history and a
    convergence flag.
    """

    def power_sum(c):
        return float(np.sum(np.abs(samples - basis @ c) ** s) * cell_volume)

    coefficients = _least_squares(basis, samples) if initial is None else initial
    value = power_sum(coefficients)
    history = [value]
    peak = float(np.max(np.abs(samples))) if samples.size else 0.0
    eps = max(peak, 1.0) * (1e-2 if s < 2 else 0.0)
    for iteration in range(1, max_iter + 1):
        if value <= (1e-30 * max(peak, 1e-300)) ** s:
            return coefficients, value, history, True
        residual = np.abs(samples - basis @ coefficients)
        floor = max(eps, 1e-12 * float(np.max(residual)))
        weights = np.maximum(residual, floor) ** (s - 2)
        candidate = _least_squares(basis, samples, weights / np.max(weights))
        direction = candidate - coefficients
        search = optimize.minimize_scalar(
            lambda t: power_sum(coefficients + t * direction),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": 1e-10},
        )
        step = search.x if search.fun < power_sum(candidate) else 1.0
        trial = coefficients + step * direction
        trial_value = power_sum(trial)
        if trial_value <= value:
            improvement = value - trial_value
            coefficients, value = trial, trial_value
        else:
            improvement = 0.0
        history.append(value)
        if s < 2:
            eps = max(eps / 10, 1e-12 * max(peak, 1e-300))
        if improvement <= tol * value and (s >= 2 or eps <= 1e-10 * max(peak, 1e-300)):
            return coefficients, value, history, True
        logger.debug("IRLS iteration %s objective=%.12g", iteration, value)
    return coefficients, value, history, False


def project_ls(
    f: GridFunction,
    theta: FrequencySet,
    box: Box,
    target: Box | None = None,
    s: float = 2.0,
    max_iter: int = DEFAULT_IRLS_MAX_ITER,
    tol: float = 1e-12,
) -> SpanElement:
    """Return an approximate minimizer of ||f 1_Q - phi||_{L^s(target)} over the span.

    Uses iteratively reweighted least squares started from the L^2 projection, with a bounded
    line search so the objective never increases.

    Raises
    ------
    MFCZConvergenceError
        If the iteration has not converged after max_iter steps. The exception carries the
        best SpanElement and the objective history.

    """
    if not 1 < s < np.inf:
        raise MFCZInvalidParameter(f"s must be in (1, inf): {s}")
    frame = ProjectionFrame.build(f.domain, theta, box, target)
    samples = frame.restricted(f.values)
    coefficients, value, history, converged = irls_fit(
        frame.basis, samples, s, frame.cell_volume, max_iter, tol
    )
    history = [x ** (1.0 / s) for x in history]
    element = SpanElement(
        theta, coefficients, objective=value ** (1.0 / s), iterations=len(history)
    )
    if not converged:
        raise MFCZConvergenceError(
            f"IRLS for s={s} did not converge in {max_iter} iterations",
            best_iterate=element,
            history=history,
        )
    return element


def project_samples(frame: ProjectionFrame, samples: np.ndarray, s: float, max_iter: int):
    """Return the L^s(target) best approximation of samples as values at the target points.

    s = 2 uses the orthonormal-basis projection. Otherwise IRLS is used and a non-converged
    result is returned with a warning.
    """
    if s == 2:
        return l2_projection_samples(frame, samples)
    coefficients, _, history, converged = irls_fit(
        frame.basis, samples, s, frame.cell_volume, max_iter, 1e-10
    )
    if not converged:
        logger.warning(
            "IRLS on %s stopped after %s iterations without converging", frame.target, len(history)
        )
    return frame.basis @ coefficients

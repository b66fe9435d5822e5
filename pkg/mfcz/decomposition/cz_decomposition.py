"""Multi-frequency Calderon-Zygmund decomposition f = g + sum_J b_J."""

import logging
from dataclasses import dataclass, field

import numpy as np
from pydantic import Field

from mfcz.common import NEGLIGIBLE_BAD_PART
from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import MFCZDimensionMismatch, MFCZGramError, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.box_family import BoxLayer
from mfcz.grid.torus import Box, BoxPoints, GridFunction, lp_norm
from mfcz.span.projection import ProjectionFrame, l2_projection_samples
from mfcz.utils.timing import timer_stats_collector, track_timing


logger = logging.getLogger(__name__)


class DecompositionAudit(MFCZBaseModel):
    """Measured constants of a decomposition."""

    threshold: float = Field(title="threshold", description="Stopping threshold lambda / sqrt(N)")
    num_boxes: int = Field(title="num_boxes", description="Number of selected boxes")
    total_box_measure: float = Field(title="total_box_measure", description="sum |J|")
    c1: float = Field(title="c1", description="sum |J| lambda / (sqrt(N) ||f||_1)")
    c2: float = Field(title="c2", description="||g||_2^2 / (||f||_1 sqrt(N) lambda)")
    c3: float = Field(title="c3", description="max_J ||f||_{L1(J)} sqrt(N) / (|J| lambda)")
    c4: float = Field(title="c4", description="max_J ||f - b_J||_{L2(J)} / (sqrt(|J|) lambda)")
    good_part_constant: float = Field(
        title="good_part_constant",
        description="max_J ||Pi_J(f 1_J)||_{L^inf(J)} / (sqrt(N) avg_J |f|)",
    )
    max_cancellation_residual: float = Field(
        title="max_cancellation_residual",
        description=(
            "max over J, j of |int b_J e^{-i xi_j y} dy| / ||b_J||_1, or / ||f 1_J||_1 when b_J"
            " is negligible"
        ),
    )
    reconstruction_error: float = Field(
        title="reconstruction_error", description="||g + sum b_J - f||_2 / ||f||_2"
    )
    max_overlap: int = Field(title="max_overlap", description="Largest number of boxes at a point")
    covers_torus: bool = Field(
        title="covers_torus", description="True when the selected boxes cover the whole torus"
    )


@dataclass
class BadPart:
    """b_J stored on the grid points of J."""

    box: Box
    pixels: int
    points: BoxPoints
    samples: np.ndarray
    projection: np.ndarray
    cancellation_residual: float

    def to_grid(self, domain) -> GridFunction:
        return GridFunction(domain, self.points.scatter(domain.shape, self.samples, fill=0j))

    @property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.samples)))


@dataclass
class CZDecomposition:
    """Good part, bad parts and audit of a decomposition of f at height lam."""

    f: GridFunction
    lam: float
    theta: FrequencySet
    g: GridFunction
    bad_parts: list = field(default_factory=list)
    audit: DecompositionAudit | None = None

    @property
    def boxes(self) -> list:
        return [x.box for x in self.bad_parts]

    def bad_sum(self) -> GridFunction:
        total = np.zeros(self.f.domain.shape, dtype=complex)
        for part in self.bad_parts:
            total[np.ix_(*part.points.axis_indices)] += part.samples.reshape(part.points.counts)
        return GridFunction(self.f.domain, total)

    def to_report(self) -> dict:
        """Return a JSON-compatible dict with the audit, boxes and cancellation residuals."""
        return {
            "lambda": self.lam,
            "num_frequencies": self.theta.size,
            "audit": self.audit.serialize() if self.audit is not None else None,
            "boxes": [
                {
                    "center": list(x.box.center),
                    "radius": x.box.radius,
                    "pixels": x.pixels,
                    "cancellation_residual": x.cancellation_residual,
                }
                for x in self.bad_parts
            ],
        }


def select_boxes(f: GridFunction, threshold, min_pixels=1):
    """Return the maximal dyadic boxes (anchored at the origin) with average |f| > threshold.

    Scales run from half the torus down to min_pixels; a box is selected when it is not
    contained in an already selected box.

    Returns
    -------
    list
        (layer, tile index) pairs.

    """
    domain = f.domain
    magnitude = np.abs(f.values)
    covered = np.zeros(domain.shape, dtype=bool)
    selected = []
    pixels = domain.points_per_dim // 2
    while pixels >= min_pixels:
        layer = BoxLayer(pixels, 0)
        averages = layer.tile_averages(magnitude, 1)
        taken = layer.to_blocks(covered).any(axis=1)
        chosen = np.nonzero((averages > threshold) & ~taken)[0]
        if chosen.size:
            selected.extend((layer, int(i)) for i in chosen)
            marks = np.zeros(layer.num_tiles(domain), dtype=bool)
            marks[chosen] = True
            covered |= layer.from_blocks(marks, domain.shape)
        pixels //= 2
    return selected


def _project_on_box(f, theta, box):
    frame = ProjectionFrame.build(f.domain, theta, box)
    samples = frame.restricted(f.values)
    try:
        projection = l2_projection_samples(frame, samples)
    except MFCZGramError as exc:
        raise MFCZGramError(
            f"projection failed on selected box {box}: {exc}", exc.clustered_pairs
        ) from exc
    return frame, samples, projection


def _cancellation_residual(frame, samples, bad_samples):
    """Return max_j |int b_J e^{-i xi_j y} dy| relative to ||b_J||_1.

    A bad part that is rounding noise against f 1_J (J too small to separate the frequencies) is
    measured relative to ||f 1_J||_1 instead.
    """
    bad_l1 = np.sum(np.abs(bad_samples)) * frame.cell_volume
    f_l1 = np.sum(np.abs(samples)) * frame.cell_volume
    scale = bad_l1 if bad_l1 > NEGLIGIBLE_BAD_PART * f_l1 else f_l1
    if scale == 0:
        return 0.0
    pairings = frame.cell_volume * (frame.basis.conj().T @ bad_samples)
    return float(np.max(np.abs(pairings)) / scale)


@track_timing(timer_stats_collector)
def decompose(f: GridFunction, lam, theta: FrequencySet, min_pixels=1) -> CZDecomposition:
    """Decompose f = g + sum_J b_J at height lam with respect to the frequencies theta.

    Parameters
    ----------
    f : GridFunction
    lam : float
        Height lambda > 0.
    theta : FrequencySet
    min_pixels : int
        Side of the smallest dyadic box examined, in grid points.

    Returns
    -------
    CZDecomposition
        The boxes J are the maximal dyadic boxes with average |f| > lam / sqrt(N). On each J,
        b_J = (f - Pi_J(f 1_J)) 1_J where Pi_J is the L^2(J) projection onto the span of the
        exponentials, so b_J is orthogonal to every e^{i xi_j . y}.

    """
    if not lam > 0:
        raise MFCZInvalidParameter(f"lambda must be positive: {lam}")
    if theta.dim != f.domain.dim:
        raise MFCZDimensionMismatch("frequency set and function dimensions differ")
    domain = f.domain
    f_l1 = lp_norm(f, 1)
    if f_l1 == 0:
        logger.info("decompose received f = 0; returning the empty decomposition")
        return CZDecomposition(f=f, lam=lam, theta=theta, g=f.copy(), audit=None)

    size = theta.size
    threshold = lam / np.sqrt(size)
    if threshold <= f_l1 / domain.measure:
        logger.warning(
            "Threshold %.6g is not above the mean of |f| (%.6g); the decomposition "
            "degenerates to all-bad",
            threshold,
            f_l1 / domain.measure,
        )

    bad_parts = []
    overlap = np.zeros(domain.shape, dtype=int)
    c3 = c4 = good_constant = 0.0
    for layer, index in select_boxes(f, threshold, min_pixels):
        box = layer.tile_box(index, domain)
        frame, samples, projection = _project_on_box(f, theta, box)
        bad = samples - projection
        measure = frame.target_measure
        f_l1_box = np.sum(np.abs(samples)) * frame.cell_volume
        c3 = max(c3, f_l1_box * np.sqrt(size) / (measure * lam))
        projection_l2 = np.sqrt(np.sum(np.abs(projection) ** 2) * frame.cell_volume)
        c4 = max(c4, projection_l2 / (np.sqrt(measure) * lam))
        average = f_l1_box / measure
        good_constant = max(
            good_constant, float(np.max(np.abs(projection))) / (np.sqrt(size) * average)
        )
        overlap[np.ix_(*frame.points.axis_indices)] += 1
        bad_parts.append(
            BadPart(
                box=box,
                pixels=layer.pixels,
                points=frame.points,
                samples=bad,
                projection=projection,
                cancellation_residual=_cancellation_residual(frame, samples, bad),
            )
        )

    # g is f off the boxes and Pi_J(f 1_J) on each J, assembled apart from the bad parts.
    good = f.values.astype(complex)
    for part in bad_parts:
        good[np.ix_(*part.points.axis_indices)] = part.projection.reshape(part.points.counts)
    decomposition = CZDecomposition(
        f=f, lam=lam, theta=theta, g=GridFunction(domain, good), bad_parts=bad_parts
    )
    bad_sum = decomposition.bad_sum()

    total_measure = sum(x.points.size for x in bad_parts) * domain.cell_volume
    f_l2 = lp_norm(f, 2)
    reconstruction = lp_norm(decomposition.g + bad_sum - f, 2) / f_l2 if f_l2 > 0 else 0.0
    covers = bool(np.all(overlap > 0))
    if covers:
        logger.warning("The selected boxes cover the whole torus (lambda=%.6g, N=%s)", lam, size)
    decomposition.audit = DecompositionAudit(
        threshold=threshold,
        num_boxes=len(bad_parts),
        total_box_measure=total_measure,
        c1=total_measure * lam / (np.sqrt(size) * f_l1),
        c2=lp_norm(decomposition.g, 2) ** 2 / (f_l1 * np.sqrt(size) * lam),
        c3=c3,
        c4=c4,
        good_part_constant=good_constant,
        max_cancellation_residual=max((x.cancellation_residual for x in bad_parts), default=0.0),
        reconstruction_error=reconstruction,
        max_overlap=int(overlap.max()),
        covers_torus=covers,
    )
    logger.debug("Decomposition at lambda=%s selected %s boxes", lam, len(bad_parts))
    return decomposition

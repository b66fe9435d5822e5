"""The multi-frequency maximal sharp function and the estimates built on it.

M#_{s,Theta} f(x) = sup over boxes Q containing x of (avg_Q |f - pr_Q(f 1_Q)|^s)^{1/s}, where
pr_Q(f 1_Q) is a best approximation of f 1_Q from span{e^{i xi_j . y}}.
"""

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import Field
from scipy import linalg

from mfcz.common import DEFAULT_IRLS_MAX_ITER, RATIO_DENOMINATOR_FLOOR
from mfcz.data_models import MFCZBaseModel, MFCZEnum
from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.box_family import BoxFamily, maximal_function
from mfcz.grid.torus import GridFunction, lp_norm_w
from mfcz.norms.envelopes import fefferman_stein_exponent, pointwise_exponent
from mfcz.span.gram import exponential_basis
from mfcz.span.projection import ProjectionFrame, irls_fit, project_samples
from mfcz.utils.timing import timer_stats_collector, track_timing


logger = logging.getLogger(__name__)


class ProjectionMode(MFCZEnum):
    """How pr_Q is computed."""

    L2 = "l2", "Orthogonal projection (exact)"
    LS = "ls", "L^s best approximation by reweighted least squares (approximate)"


class ProjectionRegion(MFCZEnum):
    """Region on which the approximation error is minimized."""

    BOX = "box", "Minimize over Q"
    TRIPLED = "tripled", "Minimize the L^s(3Q) error of f 1_Q"


@dataclass(frozen=True)
class SharpMaxConfig:
    """Parameters of the maximal sharp function.

    s is the exponent of the averages, theta the frequencies of the span and family the boxes
    of the sup.
    """

    theta: FrequencySet
    family: BoxFamily
    s: float = 2.0
    mode: ProjectionMode = ProjectionMode.L2
    region: ProjectionRegion = ProjectionRegion.TRIPLED
    max_iter: int = DEFAULT_IRLS_MAX_ITER

    def __post_init__(self):
        if not 1 < self.s < np.inf:
            raise MFCZInvalidParameter(f"s must be in (1, inf): {self.s}")
        if self.theta.dim != self.family.domain.dim:
            raise MFCZDimensionMismatch("frequency set and family dimensions differ")
        object.__setattr__(self, "mode", ProjectionMode(self.mode))
        object.__setattr__(self, "region", ProjectionRegion(self.region))

    @property
    def approximate(self) -> bool:
        return self.mode == ProjectionMode.LS and self.s != 2

    @classmethod
    def dyadic(cls, theta, domain, s=2.0, min_pixels=1, **kwargs):
        """Config over the shifted dyadic family of domain."""
        family = BoxFamily.dyadic(domain, min_pixels=min_pixels)
        return cls(theta=theta, family=family, s=s, **kwargs)


def _local_coords(domain, pixels):
    axis = np.arange(pixels) * domain.spacing
    mesh = np.meshgrid(*([axis] * domain.dim), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def _middle_third(pixels, dim):
    """Mask of the central tile among the (3 pixels)^dim points of its tripled cube."""
    axis = np.arange(3 * pixels)
    inside = (axis >= pixels) & (axis < 2 * pixels)
    mesh = np.meshgrid(*([inside] * dim), indexing="ij")
    return np.logical_and.reduce([m.reshape(-1) for m in mesh])


def _has_layer_path(layer, cfg: SharpMaxConfig) -> bool:
    if layer is None:
        return False
    if cfg.region == ProjectionRegion.BOX:
        return True
    # 3Q must fit on the torus without wrapping onto itself.
    exact = cfg.mode == ProjectionMode.L2 or cfg.s == 2
    return exact and 3 * layer.pixels <= cfg.family.domain.points_per_dim


def _layer_residuals(values, layer, cfg: SharpMaxConfig):
    """Return f - pr_Q(f 1_Q) on every tile of the layer as a (tiles, points) array.

    The span is translation invariant, so every tile uses the basis sampled on local
    coordinates. For the tripled region the basis lives on 3Q and f 1_Q vanishes outside Q,
    so only the rows of an orthonormal basis of span(3Q) that fall in Q enter.
    """
    domain = cfg.family.domain
    blocks = layer.to_blocks(values).astype(complex)
    if cfg.region == ProjectionRegion.TRIPLED:
        basis = exponential_basis(cfg.theta, _local_coords(domain, 3 * layer.pixels))
        q = linalg.orth(basis)[_middle_third(layer.pixels, domain.dim)]
        return blocks - (blocks @ q.conj()) @ q.T
    basis = exponential_basis(cfg.theta, _local_coords(domain, layer.pixels))
    if cfg.mode == ProjectionMode.L2 or cfg.s == 2:
        q = linalg.orth(basis)
        return blocks - (blocks @ q.conj()) @ q.T
    residuals = np.empty_like(blocks)
    for i, samples in enumerate(blocks):
        coefficients, *_ = irls_fit(basis, samples, cfg.s, domain.cell_volume, cfg.max_iter, 1e-10)
        residuals[i] = samples - basis @ coefficients
    return residuals


def _box_residual(values, box, cfg: SharpMaxConfig):
    """Return f - pr_Q(f 1_Q) at the grid points of Q."""
    domain = cfg.family.domain
    target = box.dilate(3) if cfg.region == ProjectionRegion.TRIPLED else box
    frame = ProjectionFrame.build(domain, cfg.theta, box, target)
    samples = frame.restricted(values)
    s = 2.0 if cfg.mode == ProjectionMode.L2 else cfg.s
    projection = project_samples(frame, samples, s, cfg.max_iter)
    return (samples - projection)[frame.inside]


def _mean_power(residuals, s, axis=None):
    return np.mean(np.abs(residuals) ** s, axis=axis) ** (1.0 / s)


@track_timing(timer_stats_collector)
def sharp_maximal(f: GridFunction, cfg: SharpMaxConfig) -> GridFunction:
    """Return M#_{s,Theta} f on the grid, the sup taken over cfg.family."""
    if f.domain != cfg.family.domain:
        raise MFCZDimensionMismatch("function and family live on different domains")
    if cfg.approximate:
        logger.info("Sharp maximal function with s=%s uses approximate L^s projections", cfg.s)

    def averages(layer, box):
        if _has_layer_path(layer, cfg):
            return _mean_power(_layer_residuals(f.values, layer, cfg), cfg.s, axis=1)
        if layer is not None:
            boxes = layer.boxes(f.domain)
            return np.array([_mean_power(_box_residual(f.values, x, cfg), cfg.s) for x in boxes])
        return _mean_power(_box_residual(f.values, box, cfg), cfg.s)

    return GridFunction(f.domain, cfg.family.sup_over_boxes(averages))


def classical_sharp(f: GridFunction, family: BoxFamily, s=1.0) -> GridFunction:
    """Return sup over boxes Q containing x of (avg_Q |f - avg_Q f|^s)^{1/s}."""

    def averages(layer, box):
        if layer is not None:
            blocks = layer.to_blocks(f.values)
            return _mean_power(blocks - blocks.mean(axis=1, keepdims=True), s, axis=1)
        samples = box.points(f.domain).gather(f.values)
        return _mean_power(samples - samples.mean(), s)

    return GridFunction(f.domain, family.sup_over_boxes(averages))


class FeffermanSteinReport(MFCZBaseModel):
    """||f||_{L^p(w)} against ||M# f||_{L^p(w)}."""

    p: float = Field(title="p")
    s: float = Field(title="s")
    t: float = Field(title="t", description="Reverse Holder exponent t of the weight class")
    num_frequencies: int = Field(title="num_frequencies")
    f_norm: float = Field(title="f_norm", description="||f||_{L^p(w)}")
    sharp_norm: float = Field(title="sharp_norm", description="||M# f||_{L^p(w)}")
    ratio: float | None = Field(title="ratio", description="f_norm / sharp_norm")
    exponent: float = Field(title="exponent", description="(t p / s) max{1/2, 1/s}")
    envelope: float = Field(title="envelope", description="N^exponent")
    degenerate: bool = Field(
        title="degenerate", description="M# f vanishes while f does not; the ratio is undefined"
    )


def fefferman_stein_ratio(
    f: GridFunction, cfg: SharpMaxConfig, p, weight=None, t=1.0
) -> FeffermanSteinReport:
    """Compare ||f||_{L^p(w)} with N^{(tp/s) max{1/2,1/s}} ||M#_{s,Theta} f||_{L^p(w)}."""
    if not p > cfg.s:
        raise MFCZInvalidParameter(f"p must exceed s: p={p}, s={cfg.s}")
    weight = np.ones(f.domain.shape) if weight is None else weight
    sharp = sharp_maximal(f, cfg)
    f_norm = lp_norm_w(f, p, weight)
    sharp_norm = lp_norm_w(sharp, p, weight)
    degenerate = f_norm > 0 and sharp_norm <= RATIO_DENOMINATOR_FLOOR * f_norm
    if degenerate:
        logger.warning("M# f vanishes for a nonzero f; f lies in the global span")
    exponent = fefferman_stein_exponent(p, t, cfg.s)
    return FeffermanSteinReport(
        p=p,
        s=cfg.s,
        t=t,
        num_frequencies=cfg.theta.size,
        f_norm=f_norm,
        sharp_norm=sharp_norm,
        ratio=None if degenerate or sharp_norm == 0 else f_norm / sharp_norm,
        exponent=exponent,
        envelope=cfg.theta.size**exponent,
        degenerate=degenerate,
    )


class PointwiseDominationReport(MFCZBaseModel):
    """sup_x M#(Tf)(x) / M_s f(x)."""

    s: float = Field(title="s")
    num_frequencies: int = Field(title="num_frequencies")
    ratio: float = Field(title="ratio", description="Sup of the pointwise ratio")
    exponent: float = Field(title="exponent", description="|1/s - 1/2|")
    envelope: float = Field(title="envelope", description="N^exponent")


def pointwise_domination(operator, f: GridFunction, cfg: SharpMaxConfig):
    """Measure sup_x M#_{s,Theta}(Tf)(x) / M_s f(x) where the denominator is above a floor."""
    if operator.theta is not None and operator.theta != cfg.theta:
        raise MFCZInvalidParameter("the operator and the sharp function use different frequencies")
    sharp = sharp_maximal(operator.apply(f), cfg).values
    maximal = maximal_function(f, cfg.family, cfg.s).values
    floor = RATIO_DENOMINATOR_FLOOR * float(np.max(np.abs(f.values)))
    valid = maximal > floor
    ratio = float(np.max(sharp[valid] / maximal[valid])) if np.any(valid) else 0.0
    exponent = pointwise_exponent(cfg.s)
    return PointwiseDominationReport(
        s=cfg.s,
        num_frequencies=cfg.theta.size,
        ratio=ratio,
        exponent=exponent,
        envelope=cfg.theta.size**exponent,
    )


class ProjectionSupReport(MFCZBaseModel):
    """sup_Q ||pr_Q(f 1_Q)||_{L^inf(Q)}^s / avg_Q |f|^s."""

    s: float = Field(title="s")
    num_frequencies: int = Field(title="num_frequencies")
    value: float = Field(title="value")
    envelope: float = Field(title="envelope", description="N^{s max{1/2, 1/s}}")


def projection_sup_ratio(f: GridFunction, cfg: SharpMaxConfig) -> ProjectionSupReport:
    """Measure the sup-norm growth of the projections over the family."""
    floor = RATIO_DENOMINATOR_FLOOR * float(np.max(np.abs(f.values))) ** cfg.s

    def ratios(layer, box):
        if _has_layer_path(layer, cfg):
            blocks = layer.to_blocks(f.values)
            projection = blocks - _layer_residuals(f.values, layer, cfg)
            peaks = np.max(np.abs(projection), axis=1) ** cfg.s
            means = np.mean(np.abs(blocks) ** cfg.s, axis=1)
            return np.where(means > floor, peaks / np.maximum(means, floor), 0.0)
        boxes = [box] if layer is None else list(layer.boxes(f.domain))
        values = []
        for item in boxes:
            samples = item.points(f.domain).gather(f.values)
            projection = samples - _box_residual(f.values, item, cfg)
            mean = np.mean(np.abs(samples) ** cfg.s)
            values.append(np.max(np.abs(projection)) ** cfg.s / mean if mean > floor else 0.0)
        return np.array(values) if layer is not None else values[0]

    value = cfg.family.max_over_boxes(ratios)
    return ProjectionSupReport(
        s=cfg.s,
        num_frequencies=cfg.theta.size,
        value=value,
        envelope=cfg.theta.size ** (cfg.s * max(0.5, 1.0 / cfg.s)),
    )

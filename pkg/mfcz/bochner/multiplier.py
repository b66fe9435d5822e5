"""Generalized Bochner-Riesz multipliers, their single-scale pieces and kernel estimates."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from pydantic import Field

from mfcz.bochner.domains import Disk, PlanarDomain
from mfcz.bochner.whitney import PLANE_DIM, PartitionOfUnity
from mfcz.common import DEFAULT_MIN_DECAY_LENGTHS, DEFAULT_POWER_METHOD_RESTARTS, DEFAULT_SEED
from mfcz.data_models import MFCZBaseModel
from mfcz.exceptions import (
    MFCZDimensionMismatch,
    MFCZInvalidOperation,
    MFCZInvalidParameter,
    MFCZResolutionError,
)
from mfcz.grid.torus import GridFunction, TorusDomain, dft, idft
from mfcz.norms.envelopes import weighted_exponent
from mfcz.norms.power_method import estimate_norm
from mfcz.operators.multifreq_operator import MultiFreqOperator
from mfcz.operators.symbols import Symbol, SymbolKind
from mfcz.utils.timing import timer_stats_collector, track_timing


logger = logging.getLogger(__name__)


@dataclass
class BRSymbol:
    """m_delta supported in the closure of a planar domain with |m| <~ d(xi, boundary)^delta.

    On a disk m = (1 - |xi - c|^2 / R^2)_+^delta. On other domains
    m = sum_i chi_i d(c_i, boundary)^delta, the distance frozen at the Whitney cube centers so
    that derivatives follow the local cube radius.
    """

    region: PlanarDomain
    delta: float
    partition: PartitionOfUnity | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise MFCZInvalidParameter(f"delta must be positive: {self.delta}")
        if not isinstance(self.region, Disk) and self.partition is None:
            raise MFCZInvalidParameter(
                f"the {self.region.name} symbol is built from a partition of unity"
            )

    def evaluate(self, domain: TorusDomain) -> np.ndarray:
        """Return m_delta on the lattice in FFT order."""
        if domain.dim != PLANE_DIM:
            raise MFCZDimensionMismatch("Bochner-Riesz symbols live on planar lattices")
        values = self._cache.get(domain)
        if values is not None:
            return values
        if isinstance(self.region, Disk):
            xi1, xi2 = domain.frequency_mesh()
            radius2 = (xi1 - self.region.center[0]) ** 2 + (xi2 - self.region.center[1]) ** 2
            values = np.maximum(1 - radius2 / self.region.radius**2, 0.0) ** self.delta
        else:
            if self.partition.cover.domain != domain:
                raise MFCZDimensionMismatch("the partition of unity lives on another lattice")
            values = np.zeros(domain.shape)
            for cube, (indices, chi) in zip(self.partition.cover.cubes, self.partition.patches):
                values[np.ix_(*indices)] += chi * cube.distance**self.delta
        values.setflags(write=False)
        self._cache[domain] = values
        return values

    def profile_constant(self, domain: TorusDomain) -> float:
        """Return max |m| / d^delta over the lattice points of the domain."""
        values = self.evaluate(domain)
        distance = self.region.lattice_distance(domain)
        inside = distance > 0
        if np.any(values[~inside] != 0):
            raise MFCZInvalidOperation(
                f"the {self.region.name} symbol is not supported in the closed domain"
            )
        return float(np.max(values[inside] / distance[inside] ** self.delta))

    def to_operator(self) -> MultiFreqOperator:
        symbol = Symbol(
            lambda xi, domain: self.evaluate(domain),
            kind=SymbolKind.BOCHNER_RIESZ,
            name=f"br-{self.region.name}",
        )
        return MultiFreqOperator(None, [symbol], name=symbol.name)


def br_symbol(region: PlanarDomain, delta, partition=None) -> BRSymbol:
    return BRSymbol(region=region, delta=delta, partition=partition)


def br_apply(symbol: BRSymbol, f: GridFunction) -> GridFunction:
    """Return R_delta f = idft(m_delta dft(f))."""
    return idft(dft(f) * symbol.evaluate(f.domain))


@dataclass
class ScaleDecomposition:
    """m_delta = sum_j 2^{j delta} sigma_j + collar with
    sigma_j = 2^{-j delta} m_delta sum_{l : 2^j <= r_l < 2^{j+1}} chi_l.
    """

    symbol: BRSymbol
    partition: PartitionOfUnity
    pieces: dict
    counts: dict
    collar: np.ndarray

    @property
    def domain(self) -> TorusDomain:
        return self.partition.cover.domain

    @property
    def scales(self) -> list:
        return sorted(self.pieces)

    def sigma(self, j) -> np.ndarray:
        """Return sigma_j; an empty scale has sigma_j = 0."""
        if j not in self.pieces:
            return np.zeros(self.domain.shape)
        return self.pieces[j]

    def reconstruct(self) -> np.ndarray:
        total = self.collar.copy()
        for j, sigma in self.pieces.items():
            total += 2.0 ** (j * self.symbol.delta) * sigma
        return total

    def exactness_error(self) -> float:
        """Max over the lattice of |sum_j 2^{j delta} sigma_j + collar - m_delta|."""
        return float(np.max(np.abs(self.reconstruct() - self.symbol.evaluate(self.domain))))

    def collar_mass(self) -> float:
        """L^2 mass of the collar symbol, sqrt(sum |collar|^2 Delta^2)."""
        spacing = self.domain.frequency_spacing
        return float(np.sqrt(np.sum(self.collar**2)) * spacing ** (PLANE_DIM / 2))

    def u_operator(self, j) -> MultiFreqOperator:
        """Return U_j, the multiplier with symbol sigma_j."""
        sigma = self.sigma(j)
        symbol = Symbol(lambda xi, domain: sigma, kind=SymbolKind.BOCHNER_RIESZ, name=f"U_{j}")
        return MultiFreqOperator(
            None, [symbol], name=f"U_{j}", metadata={"j": j, "N_j": self.counts.get(j, 0)}
        )

    def apply_u(self, j, f: GridFunction) -> GridFunction:
        return idft(dft(f) * self.sigma(j))

    def apply_t(self, j, f: GridFunction) -> GridFunction:
        """T_j f = 2^{j delta} U_j f."""
        return self.apply_u(j, f) * 2.0 ** (j * self.symbol.delta)

    def apply_collar(self, f: GridFunction) -> GridFunction:
        return idft(dft(f) * self.collar)


def decompose_scales(symbol: BRSymbol, partition: PartitionOfUnity) -> ScaleDecomposition:
    """Split m_delta into the single-scale symbols sigma_j and the collar remainder."""
    domain = partition.cover.domain
    values = symbol.evaluate(domain)
    pieces = {}
    counts = {}
    for cube, (indices, chi) in zip(partition.cover.cubes, partition.patches):
        j = cube.scale
        if j not in pieces:
            pieces[j] = np.zeros(domain.shape)
            counts[j] = 0
        window = np.ix_(*indices)
        pieces[j][window] += 2.0 ** (-j * symbol.delta) * values[window] * chi
        counts[j] += 1
    collar = values * (1 - partition.sum())
    return ScaleDecomposition(
        symbol=symbol, partition=partition, pieces=pieces, counts=counts, collar=collar
    )


def reconstruction_error(decomposition: ScaleDecomposition, f: GridFunction) -> float:
    """Return ||sum_j T_j f - (R_delta f - collar f)||_2 / ||R_delta f||_2."""
    target = br_apply(decomposition.symbol, f) - decomposition.apply_collar(f)
    total = GridFunction(f.domain, np.zeros(f.domain.shape, dtype=complex))
    for j in decomposition.scales:
        total = total + decomposition.apply_t(j, f)
    scale = np.linalg.norm(br_apply(decomposition.symbol, f).values)
    if scale == 0:
        return float(np.linalg.norm((total - target).values))
    return float(np.linalg.norm((total - target).values) / scale)


class KernelNorms(MFCZBaseModel):
    """Norms of the kernel K_j of U_j and of its symbol sigma_j."""

    j: int = Field(title="j")
    num_cubes: int = Field(title="N_j", alias="N_j")
    sigma_l2: float = Field(title="sigma_l2", description="||sigma_j||_2")
    sigma_sup: float = Field(title="sigma_sup", description="sup |sigma_j|")
    kernel_l1: float = Field(title="K_l1", alias="K_l1", description="||K_j||_1")
    kernel_l2: float = Field(title="K_l2", alias="K_l2", description="||K_j||_2")
    decay: int = Field(title="M", alias="M", description="Exponent of the tail weight")
    tail_l2: float = Field(title="tail_l2", description="||(1 + 2^j |x|)^M K_j||_2")
    tail_linf: float = Field(title="tail_linf", description="||(1 + 2^j |x|)^M K_j||_inf")
    s: float | None = Field(default=None, title="s")
    tail_ls: float | None = Field(
        default=None, title="tail_ls", description="||(1 + 2^j |x|)^M K_j||_{s'}"
    )
    periodization: float = Field(
        title="periodization",
        description="L^2 share of K_j outside the central half of the torus",
    )


def _check_wrap(domain: TorusDomain, j, min_decay_lengths):
    lengths = domain.side_length * 2.0**j
    if lengths < min_decay_lengths:
        raise MFCZResolutionError(
            f"scale j={j} needs a torus side of at least {min_decay_lengths * 2.0**-j:.6g} "
            f"(have {domain.side_length:.6g}); refine the lattice"
        )


def kernel_values(decomposition: ScaleDecomposition, j) -> np.ndarray:
    """K_j(x) = (2 pi)^{-n/2} int sigma_j(xi) e^{i x xi} d xi on the spatial grid.

    With this normalization ||K_j||_2 = ||sigma_j||_2 and U_j f = (2 pi)^{-n/2} K_j * f.
    """
    domain = decomposition.domain
    scale = (2 * math.pi) ** (-PLANE_DIM / 2) * (
        domain.frequency_spacing * domain.points_per_dim
    ) ** PLANE_DIM
    return scale * np.fft.ifftn(decomposition.sigma(j))


def kernel_norms(
    decomposition: ScaleDecomposition,
    j,
    decay=2,
    s=None,
    min_decay_lengths=DEFAULT_MIN_DECAY_LENGTHS,
) -> KernelNorms:
    """Compute the L^1, L^2 and weighted tail norms of K_j and the L^2 norm of sigma_j.

    Parameters
    ----------
    decomposition : ScaleDecomposition
    j : int
    decay : int
        M in the tail weight (1 + 2^j |x|)^M.
    s : float | None
        If given, s in [1, 2] and the tail is also measured in L^{s'}.
    min_decay_lengths : float
        Required number of kernel decay lengths 2^-j per torus side.

    """
    if s is not None and not 1 <= s <= 2:
        raise MFCZInvalidParameter(f"s must be in [1, 2]: {s}")
    domain = decomposition.domain
    _check_wrap(domain, j, min_decay_lengths)
    kernel = np.abs(kernel_values(decomposition, j))
    cell = domain.cell_volume
    offsets = [domain.torus_offset(x, 0.0) for x in domain.mesh()]
    radius = np.sqrt(sum(x**2 for x in offsets))
    tail = (1 + 2.0**j * radius) ** decay * kernel
    sigma = decomposition.sigma(j)
    kernel_l2 = float(np.sqrt(np.sum(kernel**2) * cell))
    outer = np.max(np.abs(np.stack(offsets)), axis=0) > domain.side_length / 4
    periodization = 0.0
    if kernel_l2 > 0:
        periodization = float(np.sqrt(np.sum(kernel[outer] ** 2) * cell)) / kernel_l2
    tail_ls = None
    if s is not None:
        if s == 1:
            tail_ls = float(tail.max())
        else:
            conjugate = s / (s - 1)
            tail_ls = float(np.sum(tail**conjugate) * cell) ** (1 / conjugate)
    return KernelNorms(
        j=j,
        N_j=decomposition.counts.get(j, 0),
        sigma_l2=float(np.sqrt(np.sum(sigma**2)) * domain.frequency_spacing ** (PLANE_DIM / 2)),
        sigma_sup=float(np.max(np.abs(sigma))),
        K_l1=float(np.sum(kernel) * cell),
        K_l2=kernel_l2,
        M=decay,
        tail_l2=float(np.sqrt(np.sum(tail**2) * cell)),
        tail_linf=float(tail.max()),
        s=s,
        tail_ls=tail_ls,
        periodization=periodization,
    )


class KernelScalingReport(MFCZBaseModel):
    """Kernel norms over a range of scales with their log2 slopes in j."""

    table: pd.DataFrame = Field(title="table")
    count_slope: float = Field(title="count_slope", description="d log2 N_j / dj")
    sigma_slope: float = Field(title="sigma_slope", description="d log2 ||sigma_j||_2 / dj")
    kernel_l1_slope: float = Field(title="kernel_l1_slope", description="d log2 ||K_j||_1 / dj")
    tail_linf_slope: float = Field(title="tail_linf_slope", description="d log2 tail_linf / dj")


@track_timing(timer_stats_collector)
def kernel_scaling(decomposition: ScaleDecomposition, scales, **kwargs) -> KernelScalingReport:
    """Tabulate kernel_norms over the populated scales among ``scales`` and fit slopes."""
    rows = [
        kernel_norms(decomposition, j, **kwargs).dict(by_alias=True)
        for j in scales
        if decomposition.counts.get(j, 0)
    ]
    if len(rows) < 2:
        raise MFCZInvalidParameter("kernel scaling needs at least two populated scales")
    table = pd.DataFrame(rows)

    def slope(column):
        return float(np.polyfit(table["j"], np.log2(table[column]), 1)[0])

    return KernelScalingReport(
        table=table,
        count_slope=slope("N_j"),
        sigma_slope=slope("sigma_l2"),
        kernel_l1_slope=slope("K_l1"),
        tail_linf_slope=slope("tail_linf"),
    )


@track_timing(timer_stats_collector)
def uj_norm_scan(
    decomposition: ScaleDecomposition,
    p,
    s,
    weight=None,
    t=1.0,
    scales=None,
    restarts=DEFAULT_POWER_METHOD_RESTARTS,
    seed=DEFAULT_SEED,
) -> pd.DataFrame:
    """Estimate ||U_j||_{L^p(w)} per scale against 2^{-j(n-1)/s} and N_j^gamma.

    Returns rows (j, N_j, norm, kind, scale_envelope, mfcz_envelope, scale_ratio, mfcz_ratio)
    with gamma = t p / (s min{2, s}) + |1/2 - 1/s|.
    """
    if not s >= 1:
        raise MFCZInvalidParameter(f"s must be at least 1: {s}")
    gamma = weighted_exponent(p, t, s)
    scales = decomposition.scales if scales is None else list(scales)
    rows = []
    for j in scales:
        count = decomposition.counts.get(j, 0)
        if not count:
            logger.info("Scale j=%s has no cubes; U_j = 0", j)
            continue
        estimate = estimate_norm(
            decomposition.u_operator(j),
            decomposition.domain,
            p,
            weight=weight,
            restarts=restarts,
            seed=seed,
        )
        scale_envelope = 2.0 ** (-j * (PLANE_DIM - 1) / s)
        mfcz_envelope = count**gamma
        rows.append(
            {
                "j": j,
                "N_j": count,
                "norm": estimate.value,
                "kind": estimate.kind.value,
                "scale_envelope": scale_envelope,
                "mfcz_envelope": mfcz_envelope,
                "scale_ratio": estimate.value / scale_envelope,
                "mfcz_ratio": estimate.value / mfcz_envelope,
            }
        )
    return pd.DataFrame(rows)


def delta_p(n, p) -> float:
    """Return the Bochner-Riesz exponent reached by the single-scale estimates.

    n = 2: max{2 |1/2 - 1/p| - 1/2, 0}. n >= 3: max{n |1/2 - 1/p| - 1/2, 0}, only for
    p >= 2(n + 2)/n or p <= 2(n + 2)/(n + 4).
    """
    if int(n) != n or n < 2:
        raise MFCZInvalidParameter(f"n must be an integer >= 2: {n}")
    if not p >= 1:
        raise MFCZInvalidParameter(f"p must be >= 1: {p}")
    inverse = 0.0 if np.isinf(p) else 1.0 / p
    if n >= 3 and 2 * (n + 2) / (n + 4) < p < 2 * (n + 2) / n:
        raise MFCZInvalidOperation(
            f"no exponent is available for n={n} and p={p}; the formula holds for "
            f"p >= {2 * (n + 2) / n:g} or p <= {2 * (n + 2) / (n + 4):g}"
        )
    return max(n * abs(0.5 - inverse) - 0.5, 0.0)

"""Whitney covers of planar frequency domains by dyadic lattice cubes, and the partition of
unity subordinate to them.

Cubes are described in centered lattice-index coordinates: a cube with corner a and side s
holds the lattice indices a, ..., a + s - 1 on each axis, has center (a + (s - 1) / 2) * Delta
and radius s * Delta / 2, where Delta is the lattice spacing.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from mfcz.bochner.domains import PlanarDomain
from mfcz.common import DEFAULT_PARTITION_EPSILON
from mfcz.exceptions import MFCZInvalidParameter, MFCZResolutionError
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import TorusDomain
from mfcz.operators.symbols import plateau_profile
from mfcz.utils.timing import timed_debug, timer_stats_collector, track_timing


logger = logging.getLogger(__name__)

SELECTION_FACTOR = 0.25
PLANE_DIM = 2


@dataclass(frozen=True)
class WhitneyCube:
    """Dyadic lattice cube O_i."""

    corner: tuple
    pixels: int
    center: tuple
    radius: float
    distance: float
    boundary_distance: float

    @property
    def scale(self) -> int:
        """j with 2^j <= r < 2^(j+1)."""
        return math.floor(math.log2(self.radius))

    @property
    def comparability(self) -> float:
        return self.radius / self.boundary_distance

    def index_ranges(self):
        return tuple(np.arange(a, a + self.pixels) for a in self.corner)

    def fft_indices(self, domain: TorusDomain, margin=0):
        return tuple(
            np.arange(a - margin, a + self.pixels + margin) % domain.points_per_dim
            for a in self.corner
        )


@dataclass
class WhitneyCover:
    """Disjoint dyadic cubes covering a planar domain away from a collar near its boundary."""

    region: PlanarDomain
    domain: TorusDomain
    cubes: list = field(default_factory=list)
    min_pixels: int = 2
    num_collar_cubes: int = 0

    def __len__(self):
        return len(self.cubes)

    @property
    def scales(self) -> list:
        return sorted({x.scale for x in self.cubes})

    def cubes_at(self, j) -> list:
        return [x for x in self.cubes if x.scale == j]

    def theta_j(self, j) -> FrequencySet | None:
        """Centers of the cubes with 2^j <= r < 2^(j+1), or None if there are none."""
        cubes = self.cubes_at(j)
        if not cubes:
            return None
        return FrequencySet([x.center for x in cubes], dim=2)

    def count_table(self) -> pd.DataFrame:
        """Rows (j, count, scaled_count = count 2^{j(n - 1)}) over the scales of the cover."""
        rows = []
        for j in self.scales:
            count = len(self.cubes_at(j))
            scaled = count * 2.0 ** (j * (PLANE_DIM - 1))
            rows.append({"j": j, "count": count, "scaled_count": scaled})
        return pd.DataFrame(rows, columns=["j", "count", "scaled_count"])

    def comparability_constants(self) -> tuple:
        """Return (min, max) of r_i / d(O_i, boundary) over the cubes."""
        values = [x.comparability for x in self.cubes]
        return min(values), max(values)

    def coverage_counts(self) -> np.ndarray:
        """Number of cubes containing each lattice point, in FFT order."""
        counts = np.zeros(self.domain.shape, dtype=int)
        for cube in self.cubes:
            counts[np.ix_(*cube.fft_indices(self.domain))] += 1
        return counts

    def is_disjoint(self) -> bool:
        return bool(self.coverage_counts().max() <= 1)

    def covered_mask(self) -> np.ndarray:
        return self.coverage_counts() > 0

    def collar_mask(self) -> np.ndarray:
        """Lattice points of the domain not covered by any cube."""
        return (self.region.lattice_distance(self.domain) > 0) & ~self.covered_mask()


def _make_cube(corner, pixels, spacing, distance, boundary_distance):
    center = tuple((a + (pixels - 1) / 2) * spacing for a in corner)
    return WhitneyCube(
        corner=tuple(int(a) for a in corner),
        pixels=int(pixels),
        center=center,
        radius=pixels * spacing / 2,
        distance=float(distance),
        boundary_distance=float(boundary_distance),
    )


@track_timing(timer_stats_collector)
def whitney_cover(region: PlanarDomain, domain: TorusDomain, min_pixels=2) -> WhitneyCover:
    """Return the maximal dyadic lattice cubes whose distance to the boundary is at least
    SELECTION_FACTOR times their side.

    Cubes are examined top down from the whole lattice. A cube whose center is farther than
    its half diagonal outside the domain is discarded; a cube that is neither selected nor
    discarded is split into four until its side would drop below min_pixels, and the cubes left
    at that point form the uncovered collar.
    """
    if min_pixels < 2:
        raise MFCZInvalidParameter(f"min_pixels must be at least 2: {min_pixels}")
    region.check_resolved(domain)
    spacing = domain.frequency_spacing
    half = domain.points_per_dim // 2
    corners = np.array([[-half, -half]])
    pixels = domain.points_per_dim
    cubes = []
    collar = 0
    while corners.size:
        centers = (corners + (pixels - 1) / 2) * spacing
        distance = region.signed_distance(centers[:, 0], centers[:, 1])
        side = pixels * spacing
        # A cube holds the lattice cells of its points, half a spacing around each.
        lower = (corners - 0.5) * spacing
        gap = region.box_distance(lower, lower + side)
        selected = gap >= SELECTION_FACTOR * side
        outside = distance < -side / math.sqrt(2)
        cubes.extend(
            _make_cube(c, pixels, spacing, d, g)
            for c, d, g in zip(corners[selected], distance[selected], gap[selected])
        )
        remaining = corners[~selected & ~outside]
        if pixels // 2 < min_pixels or pixels % 2:
            collar += len(remaining)
            break
        pixels //= 2
        offsets = np.array([[0, 0], [0, pixels], [pixels, 0], [pixels, pixels]])
        corners = (remaining[:, None, :] + offsets[None, :, :]).reshape(-1, 2)

    if not cubes:
        raise MFCZResolutionError(
            f"{region.name} is thinner than {min_pixels} lattice points everywhere; "
            "refine the lattice"
        )
    cover = WhitneyCover(
        region=region, domain=domain, cubes=cubes, min_pixels=min_pixels, num_collar_cubes=collar
    )
    low, high = cover.comparability_constants()
    logger.info(
        "Whitney cover of %s: %s cubes over scales %s, comparability in [%.3g, %.3g]",
        region.name,
        len(cubes),
        cover.scales,
        low,
        high,
    )
    return cover


def scale_count_slope(cover: WhitneyCover, scales=None) -> float:
    """Slope of log2(count_j) against j over the requested scales."""
    table = cover.count_table()
    if scales is not None:
        table = table[table["j"].isin(list(scales))]
    if len(table) < 2:
        raise MFCZInvalidParameter("a slope needs at least two populated scales")
    return float(np.polyfit(table["j"], np.log2(table["count"]), 1)[0])


@dataclass
class PartitionOfUnity:
    """chi_i = eta_i / sum_k eta_k with eta_i a plateau bump on (1 + eps) O_i.

    Each chi_i is stored on a patch of lattice indices around its cube.
    """

    cover: WhitneyCover
    epsilon: float
    patches: list
    total: np.ndarray

    def __len__(self):
        return len(self.patches)

    def chi(self, index) -> np.ndarray:
        """Return chi_index on the whole lattice in FFT order."""
        indices, values = self.patches[index]
        grid = np.zeros(self.cover.domain.shape)
        grid[np.ix_(*indices)] = values
        return grid

    def sum(self) -> np.ndarray:
        """Return sum_i chi_i on the lattice."""
        grid = np.zeros(self.cover.domain.shape)
        for indices, values in self.patches:
            grid[np.ix_(*indices)] += values
        return grid

    def uncovered_mask(self) -> np.ndarray:
        """Lattice points of the domain where every eta_i vanishes."""
        inside = self.cover.region.lattice_distance(self.cover.domain) > 0
        return inside & (self.total == 0)

    def derivative_table(self) -> pd.DataFrame:
        """Rows (j, max_scaled_gradient) with max_i ||grad chi_i||_inf r_i per scale."""
        spacing = self.cover.domain.frequency_spacing
        best = {}
        for cube, (_, values) in zip(self.cover.cubes, self.patches):
            gradients = np.gradient(values, spacing)
            magnitude = np.sqrt(sum(g**2 for g in gradients))
            scaled = float(np.max(magnitude)) * cube.radius
            best[cube.scale] = max(best.get(cube.scale, 0.0), scaled)
        rows = [{"j": j, "max_scaled_gradient": v} for j, v in sorted(best.items())]
        return pd.DataFrame(rows, columns=["j", "max_scaled_gradient"])


def _bump_patch(cube: WhitneyCube, domain: TorusDomain, epsilon):
    margin = math.ceil(epsilon * cube.pixels / 2) + 1
    spacing = domain.frequency_spacing
    axes = [
        np.abs(np.arange(a - margin, a + cube.pixels + margin) * spacing - c)
        for a, c in zip(cube.corner, cube.center)
    ]
    t = np.maximum(axes[0][:, None], axes[1][None, :]) / cube.radius
    return cube.fft_indices(domain, margin), plateau_profile(t, 1.0, 1.0 + epsilon)


@timed_debug
def partition_of_unity(
    cover: WhitneyCover, epsilon=DEFAULT_PARTITION_EPSILON
) -> PartitionOfUnity:
    """Build chi_i with sum_i chi_i = 1 wherever some eta_i is positive."""
    if not epsilon > 0:
        raise MFCZInvalidParameter(f"epsilon must be positive: {epsilon}")
    domain = cover.domain
    bumps = [_bump_patch(x, domain, epsilon) for x in cover.cubes]
    total = np.zeros(domain.shape)
    for indices, values in bumps:
        total[np.ix_(*indices)] += values
    patches = []
    for indices, values in bumps:
        local = total[np.ix_(*indices)]
        chi = np.divide(values, local, out=np.zeros_like(values), where=local > 0)
        patches.append((indices, chi))
    partition = PartitionOfUnity(cover=cover, epsilon=epsilon, patches=patches, total=total)
    uncovered = int(np.count_nonzero(partition.uncovered_mask()))
    if uncovered:
        logger.warning(
            "%s lattice points of %s lie in the uncovered collar", uncovered, cover.region.name
        )
    return partition

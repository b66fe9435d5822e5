"""Finite box families and the maximal functions built on them."""

import logging
from dataclasses import dataclass, field

import numpy as np

from mfcz.exceptions import MFCZDimensionMismatch, MFCZInvalidParameter
from mfcz.grid.torus import Box, GridFunction, TorusDomain, check_exponent


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoxLayer:
    """Tiling of the torus by cubes of ``pixels`` grid points per side.

    The tiles start at grid index ``offset`` on every axis.
    """

    pixels: int
    offset: int = 0

    def num_tiles(self, domain: TorusDomain) -> int:
        return (domain.points_per_dim // self.pixels) ** domain.dim

    def to_blocks(self, values: np.ndarray) -> np.ndarray:
        """Reshape a grid array into (tile, points-per-tile) form."""
        dim = values.ndim
        shifted = np.roll(values, -self.offset, axis=tuple(range(dim)))
        count = values.shape[0] // self.pixels
        if dim == 1:
            return shifted.reshape(count, self.pixels)
        blocks = shifted.reshape(count, self.pixels, count, self.pixels)
        return blocks.transpose(0, 2, 1, 3).reshape(count * count, self.pixels**2)

    def from_blocks(self, tile_values: np.ndarray, shape) -> np.ndarray:
        """Broadcast one value per tile back onto the grid."""
        dim = len(shape)
        count = shape[0] // self.pixels
        if dim == 1:
            grid = np.repeat(tile_values, self.pixels)
        else:
            grid = tile_values.reshape(count, count)
            grid = np.repeat(np.repeat(grid, self.pixels, axis=0), self.pixels, axis=1)
        return np.roll(grid, self.offset, axis=tuple(range(dim)))

    def tile_averages(self, values: np.ndarray, p=1) -> np.ndarray:
        """Return (average of |values|^p)^(1/p) for every tile."""
        blocks = np.abs(self.to_blocks(values))
        if np.isinf(p):
            return blocks.max(axis=1)
        if p == 1:
            return blocks.mean(axis=1)
        return np.mean(blocks**p, axis=1) ** (1.0 / p)

    def tile_box(self, index, domain: TorusDomain) -> Box:
        """Return the tile with the given position in tile order."""
        count = domain.points_per_dim // self.pixels
        positions = np.unravel_index(index, (count,) * domain.dim)
        h = domain.spacing
        center = [
            ((int(k) * self.pixels + self.offset) % domain.points_per_dim + (self.pixels - 1) / 2)
            * h
            % domain.side_length
            for k in positions
        ]
        return Box(tuple(center), self.pixels * h / 2)

    def boxes(self, domain: TorusDomain):
        """Generate the tiles as Box instances in tile order."""
        h = domain.spacing
        count = domain.points_per_dim // self.pixels
        starts = (np.arange(count) * self.pixels + self.offset) % domain.points_per_dim
        centers = (starts + (self.pixels - 1) / 2) * h % domain.side_length
        radius = self.pixels * h / 2
        if domain.dim == 1:
            for c in centers:
                yield Box((c,), radius)
        else:
            for c0 in centers:
                for c1 in centers:
                    yield Box((c0, c1), radius)


@dataclass
class BoxFamily:
    """A finite family of boxes: tilings plus explicitly listed boxes."""

    domain: TorusDomain
    layers: list = field(default_factory=list)
    extra_boxes: list = field(default_factory=list)

    def __post_init__(self):
        for layer in self.layers:
            if self.domain.points_per_dim % layer.pixels != 0:
                raise MFCZInvalidParameter(
                    f"layer size {layer.pixels} does not divide {self.domain.points_per_dim}"
                )
        for box in self.extra_boxes:
            if box.dim != self.domain.dim:
                raise MFCZDimensionMismatch(f"box {box} has the wrong dimension")
        if not self.layers and not self.extra_boxes:
            raise MFCZInvalidParameter("a box family needs at least one box")

    @classmethod
    def dyadic(cls, domain: TorusDomain, depth=None, shifted=True, min_pixels=1):
        """Dyadic cubes from side L/2 down, optionally with half-shifted copies.

        Parameters
        ----------
        domain : TorusDomain
        depth : int | None
            Number of dyadic scales to include, starting at side L/2. None uses every scale
            down to min_pixels.
        shifted : bool
            Include the tilings shifted by half a side length.
        min_pixels : int
            Smallest cube side in grid points.

        """
        layers = []
        pixels = domain.points_per_dim // 2
        while pixels >= min_pixels and (depth is None or len({x.pixels for x in layers}) < depth):
            layers.append(BoxLayer(pixels, 0))
            if shifted and pixels >= 2:
                layers.append(BoxLayer(pixels, pixels // 2))
            pixels //= 2
        return cls(domain=domain, layers=layers)

    @classmethod
    def from_boxes(cls, domain: TorusDomain, boxes):
        return cls(domain=domain, extra_boxes=list(boxes))

    def boxes(self):
        """Generate every box in the family."""
        for layer in self.layers:
            yield from layer.boxes(self.domain)
        yield from self.extra_boxes

    def __len__(self):
        return sum(x.num_tiles(self.domain) for x in self.layers) + len(self.extra_boxes)

    @property
    def scales(self):
        """Sorted distinct tile sizes in grid points."""
        return sorted({x.pixels for x in self.layers})

    def sup_over_boxes(self, func, initial=0.0):
        """Return max over boxes Q containing each point of func(Q).

        func receives (layer, None) for tilings and must return one value per tile; it
        receives (None, box) for extra boxes and must return a scalar.
        """
        shape = self.domain.shape
        result = np.full(shape, initial, dtype=float)
        for layer in self.layers:
            np.maximum(result, layer.from_blocks(func(layer, None), shape), out=result)
        for box in self.extra_boxes:
            mask = box.mask(self.domain)
            result[mask] = np.maximum(result[mask], func(None, box))
        return result

    def max_over_boxes(self, func):
        """Return the largest value of func over the family (same calling convention)."""
        best = -np.inf
        for layer in self.layers:
            best = max(best, float(np.max(func(layer, None))))
        for box in self.extra_boxes:
            best = max(best, float(func(None, box)))
        return best


def maximal_function(f: GridFunction, family: BoxFamily, p=1) -> GridFunction:
    """Return M_p f(x) = sup over boxes Q in the family containing x of
    (average over Q of |f|^p)^(1/p).
    """
    check_exponent(p)
    if f.domain != family.domain:
        raise MFCZDimensionMismatch("function and family live on different domains")

    def averages(layer, box):
        if layer is not None:
            return layer.tile_averages(f.values, p)
        samples = np.abs(box.points(f.domain).gather(f.values))
        if np.isinf(p):
            return samples.max()
        return np.mean(samples**p) ** (1.0 / p)

    return GridFunction(f.domain, family.sup_over_boxes(averages))

"""Multi-frequency Calderon-Zygmund operators T = sum_j T_j realized spectrally."""

import logging

import numpy as np
from pydantic import Field

from mfcz.data_models import MFCZBaseModel, MFCZEnum
from mfcz.exceptions import (
    MFCZDimensionMismatch,
    MFCZInvalidParameter,
)
from mfcz.frequency.freqset import FrequencySet
from mfcz.grid.torus import Box, GridFunction, TorusDomain, dft, idft
from mfcz.operators.symbols import (
    HormanderProfile,
    Symbol,
    SymbolKind,
    bump_constant,
    cube_symbol,
    hormander_symbol,
    identity_symbol,
    mf_hilbert_symbol,
)


logger = logging.getLogger(__name__)


class ApplicationMode(MFCZEnum):
    """How the pieces of an operator are given."""

    MULTIPLIER = "multiplier", "Pieces are Fourier multipliers on the lattice"
    CONVOLUTION = "convolution", "Pieces are convolution kernels on the torus"


def kernel_to_symbol(kernel, name="kernel") -> Symbol:
    """Return the multiplier of convolution with a kernel.

    kernel is a callable ``func(offsets, domain)`` receiving the torus offsets of the grid
    points from the origin (one array per axis). The multiplier is h^n * fft(K) so that
    idft(m * dft(f)) is the grid quadrature of the periodic convolution K * f.
    """

    def evaluator(xi, domain):
        offsets = [domain.torus_offset(x, 0.0) for x in domain.mesh()]
        values = np.asarray(kernel(offsets, domain))
        return domain.cell_volume * np.fft.fftn(values)

    return Symbol(evaluator, kind=SymbolKind.CONVOLUTION, name=name)


def symbol_to_kernel(symbol: Symbol, domain: TorusDomain) -> np.ndarray:
    """Inverse of :func:`kernel_to_symbol`: kernel values on the grid (origin at index 0)."""
    return np.fft.ifftn(symbol.evaluate(domain)) / domain.cell_volume


class MultiFreqOperator:
    """T = sum_j T_j with every piece a Fourier multiplier on the lattice.

    Convolution pieces are converted to multipliers through :func:`kernel_to_symbol`, so
    every operator built here is applied spectrally.
    """

    def __init__(
        self,
        theta: FrequencySet | None,
        pieces,
        mode=ApplicationMode.MULTIPLIER,
        name="operator",
        metadata=None,
    ):
        if not pieces:
            raise MFCZInvalidParameter("an operator needs at least one piece")
        self._theta = theta
        self._pieces = list(pieces)
        self._mode = mode
        self._name = name
        self.metadata = metadata or {}

    def __repr__(self):
        size = None if self._theta is None else self._theta.size
        return f"MultiFreqOperator(name={self._name}, N={size}, pieces={len(self._pieces)})"

    @property
    def theta(self) -> FrequencySet | None:
        return self._theta

    @property
    def pieces(self) -> list:
        return self._pieces

    @property
    def mode(self) -> ApplicationMode:
        return self._mode

    @property
    def name(self) -> str:
        return self._name

    @property
    def is_multiplier(self) -> bool:
        return True

    def symbol(self, domain: TorusDomain) -> np.ndarray:
        """Return sum_j m_j on the lattice of domain."""
        total = np.zeros(domain.shape, dtype=complex)
        for piece in self._pieces:
            total += piece.evaluate(domain)
        return total

    def apply(self, f: GridFunction) -> GridFunction:
        """Return idft(m * dft(f)) with m the summed symbol."""
        return idft(dft(f) * self.symbol(f.domain))

    def apply_piece(self, index, f: GridFunction) -> GridFunction:
        return idft(dft(f) * self._pieces[index].evaluate(f.domain))

    def adjoint(self):
        return MultiFreqOperator(
            self._theta,
            [x.conj() for x in self._pieces],
            mode=self._mode,
            name=f"{self._name}*",
            metadata=dict(self.metadata),
        )


class PointwiseMultiplication:
    """f -> a f for a fixed grid function a. Not a Fourier multiplier."""

    def __init__(self, factor: GridFunction, name="pointwise"):
        self._factor = factor
        self._name = name
        self.theta = None

    @property
    def name(self) -> str:
        return self._name

    @property
    def is_multiplier(self) -> bool:
        return False

    def apply(self, f: GridFunction) -> GridFunction:
        return f * self._factor

    def adjoint(self):
        return PointwiseMultiplication(self._factor.conj(), name=f"{self._name}*")


def apply(operator, f: GridFunction) -> GridFunction:
    """Apply a MultiFreqOperator (or any operator with an ``apply`` method) to f."""
    return operator.apply(f)


def operator_from_symbol(symbol: Symbol, theta=None, name=None) -> MultiFreqOperator:
    return MultiFreqOperator(
        theta if theta is not None else symbol.theta, [symbol], name=name or symbol.name
    )


def identity_operator(theta=None) -> MultiFreqOperator:
    return MultiFreqOperator(theta, [identity_symbol()], name="identity")


def convolution_operator(kernel, name="convolution") -> MultiFreqOperator:
    """Return the operator of convolution with kernel (see :func:`kernel_to_symbol`)."""
    return MultiFreqOperator(
        None, [kernel_to_symbol(kernel, name)], mode=ApplicationMode.CONVOLUTION, name=name
    )


def _check_disjoint(cubes):
    for i, first in enumerate(cubes):
        for second in cubes[i + 1 :]:
            gap = np.max(np.abs(np.subtract(first.center, second.center)))
            if gap < first.radius + second.radius - 1e-12 * max(first.radius, second.radius):
                raise MFCZInvalidParameter(f"frequency cubes {first} and {second} overlap")


def bump_sum_operator(cubes, decay=None) -> MultiFreqOperator:
    """Return T f = sum_j phi_j * f with phi_j^ a smooth bump on the cube Q_j.

    Each bump equals 1 on Q_j / 2 and vanishes outside Q_j. Theta is the set of cube
    centers. ``metadata["bump_constant"]`` holds
    C(r_1, ..., r_N) = sup_t sum_j (r_j t)^(n+1) / (1 + r_j t)^M with M = decay (default n + 2).
    """
    cubes = [x if isinstance(x, Box) else Box(*x) for x in cubes]
    if not cubes:
        raise MFCZInvalidParameter("bump_sum_operator needs at least one cube")
    dim = cubes[0].dim
    if any(x.dim != dim for x in cubes):
        raise MFCZDimensionMismatch("cubes have different dimensions")
    _check_disjoint(cubes)
    theta = FrequencySet([x.center for x in cubes], dim=dim)
    pieces = [cube_symbol(x.center, x.radius) for x in cubes]
    radii = [x.radius for x in cubes]
    metadata = {
        "radii": radii,
        "bump_constant": bump_constant(radii, dim, decay),
        "decay": dim + 2 if decay is None else decay,
    }
    return MultiFreqOperator(theta, pieces, name="bump_sum", metadata=metadata)


def modulated_operator(base, theta: FrequencySet) -> MultiFreqOperator:
    """Return (1/N) sum_j M_{xi_j} T M_{-xi_j}, the average of the modulated copies of T.

    base is a MultiFreqOperator; the piece for xi_j has symbol m(xi - xi_j) / N.
    """
    pieces = []
    for freq in theta.freqs:
        for piece in base.pieces:
            pieces.append(piece.shifted(freq).scaled(1.0 / theta.size))
    return MultiFreqOperator(theta, pieces, name=f"modulated-{base.name}")


class BumpFamily(MFCZEnum):
    """Arrangements of disjoint frequency cubes for bump-sum operators."""

    EQUAL = "equal", "Equal radii r, centers 3r apart"
    DYADIC_POINT = "dyadic_point", "Radii 2^k r at distance about 2^k r from the origin"
    DYADIC_SCALE = "dyadic_scale", "Radii 2^k r in shuffled order, no common center"


def bump_family_cubes(family, count, radius=1.0, dim=1, rng=None) -> list:
    """Return count disjoint cubes of the family, laid out along the first axis.

    With equal radii C(r_1, ..., r_N) grows like N; both dyadic families keep it bounded.
    """
    if count < 1 or not radius > 0:
        raise MFCZInvalidParameter(f"need count >= 1 and radius > 0: {count}, {radius}")
    scales = radius * 2.0 ** np.arange(count)
    match BumpFamily(family):
        case BumpFamily.EQUAL:
            radii = np.full(count, radius)
            centers = 3 * radius * np.arange(count)
        case BumpFamily.DYADIC_POINT:
            radii = scales
            centers = 3 * scales
        case BumpFamily.DYADIC_SCALE:
            rng = np.random.default_rng(0) if rng is None else rng
            radii = scales[rng.permutation(count)]
            centers = np.cumsum(2 * radii + radius) - radii
    cubes = []
    for center, r in zip(centers, radii):
        cubes.append(Box((float(center),) + (0.0,) * (dim - 1), float(r)))
    return cubes


def theta_cubes(theta: FrequencySet) -> list:
    """Disjoint cubes centered at the frequencies, each with half its nearest-neighbour gap."""
    if theta.size == 1:
        raise MFCZInvalidParameter("cubes around a single frequency need an explicit radius")
    radii = theta.min_gaps() / (2 * np.sqrt(theta.dim))
    return [Box(tuple(x), float(r)) for x, r in zip(theta.freqs, radii)]


class OperatorPreset(MFCZEnum):
    """Operators available from the command line."""

    MF_HILBERT = "mfhilbert", "Symbol alternating +-1 across the frequencies"
    HORMANDER = "hormander", "Smooth multi-frequency Hormander symbol"
    BUMP_SUM = "bumpsum", "Sum of smooth bumps on disjoint cubes around the frequencies"


def make_operator(preset, theta: FrequencySet, profile=HormanderProfile.ODD):
    """Return the preset operator for theta."""
    match OperatorPreset(preset):
        case OperatorPreset.MF_HILBERT:
            return operator_from_symbol(mf_hilbert_symbol(theta), theta)
        case OperatorPreset.HORMANDER:
            return operator_from_symbol(hormander_symbol(theta, profile=profile), theta)
        case OperatorPreset.BUMP_SUM:
            return bump_sum_operator(theta_cubes(theta))


class KernelRegularity(MFCZBaseModel):
    """Measured constant of sum_j |grad(e^{-i xi_j x} K_j(x))| <= C |x|^{-n-1} C(r)."""

    constant: float = Field(title="constant", description="Measured C")
    bump_constant: float = Field(title="bump_constant", description="C(r_1, ..., r_N)")
    min_radius: float = Field(title="min_radius", description="Smallest |x| examined")
    max_radius: float = Field(title="max_radius", description="Largest |x| examined")


def kernel_regularity(operator: MultiFreqOperator, domain: TorusDomain, min_pixels=2):
    """Measure the regularity of the demodulated kernels of a bump-sum operator.

    The demodulated kernels e^{-i xi_j x} K_j(x) are differentiated with centered
    differences and the sum of the gradient magnitudes is compared with
    |x|^{-n-1} C(r_1, ..., r_N) on min_pixels * h <= |x| <= L / 4.
    """
    if operator.theta is None or len(operator.pieces) != operator.theta.size:
        raise MFCZInvalidParameter("kernel regularity needs one piece per frequency")
    constant_r = operator.metadata.get("bump_constant", 1.0)
    offsets = [domain.torus_offset(x, 0.0) for x in domain.mesh()]
    radius = np.sqrt(sum(x**2 for x in offsets))
    total = np.zeros(domain.shape)
    for freq, piece in zip(operator.theta.freqs, operator.pieces):
        kernel = symbol_to_kernel(piece, domain)
        phase = np.exp(-1j * sum(xi * x for xi, x in zip(freq, offsets)))
        demodulated = np.fft.fftshift(kernel * phase)
        gradients = np.gradient(demodulated, domain.spacing)
        if domain.dim == 1:
            gradients = [gradients]
        magnitude = np.sqrt(sum(np.abs(g) ** 2 for g in gradients))
        total += np.fft.ifftshift(magnitude)
    low, high = min_pixels * domain.spacing, domain.side_length / 4
    region = (radius >= low) & (radius <= high)
    scaled = total[region] * radius[region] ** (domain.dim + 1) / constant_r
    return KernelRegularity(
        constant=float(scaled.max()),
        bump_constant=constant_r,
        min_radius=low,
        max_radius=high,
    )

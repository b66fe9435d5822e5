"""Frequency collections, distances to them and iterated sumsets."""

import logging
from math import comb

import numpy as np
import pandas as pd

from mfcz.common import DEFAULT_SUMSET_CAP, FREQUENCY_DEDUP_TOLERANCE
from mfcz.exceptions import (
    MFCZCardinalityError,
    MFCZDimensionMismatch,
    MFCZInvalidFile,
    MFCZInvalidParameter,
)


logger = logging.getLogger(__name__)


class FrequencySet:
    """Ordered collection of N distinct frequency vectors.

    One-dimensional sets are stored in increasing order. Multi-dimensional sets keep the
    order in which they were given.
    """

    def __init__(self, freqs, dim=None):
        arr = np.asarray(freqs, dtype=float)
        if arr.ndim <= 1:
            arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(-1, dim)
        if dim is not None and arr.shape[1] != dim:
            raise MFCZDimensionMismatch(f"expected {dim}-dimensional frequencies: {arr.shape}")
        if arr.shape[0] == 0:
            raise MFCZInvalidParameter("a frequency set needs at least one frequency")
        if not np.all(np.isfinite(arr)):
            raise MFCZInvalidParameter("frequencies must be finite")
        if arr.shape[1] == 1:
            arr = arr[np.argsort(arr[:, 0], kind="stable")]
            if np.any(np.diff(arr[:, 0]) == 0):
                raise MFCZInvalidParameter("frequencies must be distinct")
        elif len(np.unique(arr, axis=0)) != len(arr):
            raise MFCZInvalidParameter("frequencies must be distinct")
        arr.setflags(write=False)
        self._freqs = arr

    def __repr__(self):
        return f"FrequencySet(N={self.size}, dim={self.dim})"

    def __len__(self):
        return self._freqs.shape[0]

    def __eq__(self, other):
        return isinstance(other, FrequencySet) and np.array_equal(self._freqs, other._freqs)

    def __hash__(self):
        return hash(self._freqs.tobytes())

    @property
    def freqs(self) -> np.ndarray:
        """Frequencies as an (N, dim) array."""
        return self._freqs

    @property
    def size(self) -> int:
        return len(self)

    @property
    def dim(self) -> int:
        return self._freqs.shape[1]

    def values_1d(self) -> np.ndarray:
        if self.dim != 1:
            raise MFCZDimensionMismatch("frequency set is not one-dimensional")
        return self._freqs[:, 0]

    def min_gaps(self) -> np.ndarray:
        """Distance from each frequency to its nearest neighbour (inf when N = 1)."""
        if self.size == 1:
            return np.array([np.inf])
        diffs = self._freqs[:, None, :] - self._freqs[None, :, :]
        dist = np.sqrt(np.sum(diffs**2, axis=-1))
        np.fill_diagonal(dist, np.inf)
        return dist.min(axis=1)

    def translate(self, shift):
        return FrequencySet(self._freqs + np.asarray(shift, dtype=float), dim=self.dim)

    def scale(self, factor):
        return FrequencySet(self._freqs * factor, dim=self.dim)

    def on_lattice(self, domain):
        """Return the set snapped to the frequency lattice of domain."""
        if domain.dim != self.dim:
            raise MFCZDimensionMismatch("frequency set and domain dimensions differ")
        snapped, _ = domain.snap_frequencies(self._freqs)
        if len(np.unique(snapped, axis=0)) != len(snapped):
            raise MFCZInvalidParameter(
                "snapping to the lattice merged distinct frequencies; refine the lattice"
            )
        return FrequencySet(snapped, dim=self.dim)

    def lattice_indices(self, domain):
        """Return the signed integer lattice indices of the (already snapped) frequencies."""
        _, indices = domain.snap_frequencies(self._freqs)
        return indices

    def clustered_pairs(self, radius, threshold):
        """Return index pairs (j, k) with |xi_j - xi_k| * radius < threshold."""
        diffs = self._freqs[:, None, :] - self._freqs[None, :, :]
        dist = np.sqrt(np.sum(diffs**2, axis=-1)) * radius
        rows, cols = np.nonzero(np.triu(dist < threshold, k=1))
        return list(zip(rows.tolist(), cols.tolist()))

    def to_dataframe(self):
        columns = ["xi"] if self.dim == 1 else [f"xi{i}" for i in range(self.dim)]
        return pd.DataFrame(self._freqs, columns=columns)


def arithmetic_set(count, step=1.0, start=None):
    """Return (start, start + step, ..., start + (count - 1) step); start defaults to step."""
    if count < 1:
        raise MFCZInvalidParameter(f"count must be positive: {count}")
    start = step if start is None else start
    return FrequencySet(start + step * np.arange(count))


def random_set(count, rng, width=None, dim=1):
    """Return count uniform random frequencies in [0, width)^dim; width defaults to 4 * count."""
    if count < 1:
        raise MFCZInvalidParameter(f"count must be positive: {count}")
    width = 4.0 * count if width is None else width
    return FrequencySet(rng.uniform(0.0, width, size=(count, dim)), dim=dim)


def cluster_set(count, eps):
    """Return pairs {k, k + eps} for k = 0, 1, ... until count frequencies are produced."""
    if count < 1 or not 0 < eps < 0.5:
        raise MFCZInvalidParameter(f"invalid cluster parameters: count={count} eps={eps}")
    base = np.arange((count + 1) // 2, dtype=float)
    values = np.sort(np.concatenate([base, base + eps]))[:count]
    return FrequencySet(values)


def parse_theta(text, seed=None):
    """Build a FrequencySet from a preset string or a CSV file path.

    Presets: ``arith:N[:step]``, ``random:N:seed[:width]``, ``cluster:N:eps``.
    """
    parts = text.split(":")
    try:
        match parts[0]:
            case "arith":
                step = float(parts[2]) if len(parts) > 2 else 1.0
                return arithmetic_set(int(parts[1]), step=step)
            case "random":
                rng_seed = int(parts[2]) if len(parts) > 2 else (seed or 0)
                width = float(parts[3]) if len(parts) > 3 else None
                return random_set(int(parts[1]), np.random.default_rng(rng_seed), width=width)
            case "cluster":
                return cluster_set(int(parts[1]), float(parts[2]))
    except (IndexError, ValueError) as exc:
        raise MFCZInvalidParameter(f"invalid frequency preset {text!r}: {exc}") from exc
    return read_frequency_csv(text)


def read_frequency_csv(filename):
    """Read a frequency set from a CSV file with one vector per row and no header."""
    try:
        df = pd.read_csv(filename, header=None, comment="#")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise MFCZInvalidFile(f"cannot read frequencies from {filename}: {exc}") from exc
    values = df.to_numpy(dtype=float)
    return FrequencySet(values, dim=values.shape[1])


def dist_to_set(xi, theta: FrequencySet) -> float:
    """Return min over j of the Euclidean distance |xi - xi_j|."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape[-1] != theta.dim:
        raise MFCZDimensionMismatch(f"point {xi} does not match dimension {theta.dim}")
    return float(np.min(np.linalg.norm(theta.freqs - xi, axis=1)))


def dist_to_set_grid(points, theta: FrequencySet) -> np.ndarray:
    """Vectorized dist_to_set for points with trailing dimension theta.dim."""
    points = np.asarray(points, dtype=float)
    if theta.dim == 1 and points.shape[-1:] != (1,):
        points = points[..., None]
    diffs = points[..., None, :] - theta.freqs
    return np.sqrt(np.sum(diffs**2, axis=-1)).min(axis=-1)


def _dedup_sorted_1d(values, tol):
    values = np.sort(values)
    keep = np.empty(len(values), dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(values) > tol
    return values[keep]


def _dedup_rounded(points, tol):
    keys = np.round(points / tol).astype(np.int64)
    _, index = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(index)]


def sumset(theta: FrequencySet, k: int, cap=DEFAULT_SUMSET_CAP, tol=FREQUENCY_DEDUP_TOLERANCE):
    """Return the k-fold sumset {xi_i1 + ... + xi_ik} with repetition, deduplicated.

    Parameters
    ----------
    theta : FrequencySet
    k : int
        Number of summands, k >= 1.
    cap : int
        Largest number of candidate sums enumerated in one step.
    tol : float
        Absolute tie threshold for deduplication.

    Returns
    -------
    FrequencySet

    """
    if k < 1:
        raise MFCZInvalidParameter(f"k must be a positive integer: {k}")
    base = theta.freqs
    current = base
    for step in range(2, k + 1):
        candidates = len(current) * len(base)
        if candidates > cap:
            raise MFCZCardinalityError(
                f"sumset step {step} enumerates {candidates} sums, above the cap {cap}"
            )
        sums = (current[:, None, :] + base[None, :, :]).reshape(-1, theta.dim)
        if theta.dim == 1:
            current = _dedup_sorted_1d(sums[:, 0], tol)[:, None]
        else:
            current = _dedup_rounded(sums, tol)
        logger.debug("sumset step %s: %s elements", step, len(current))
    if len(current) > cap:
        raise MFCZCardinalityError(f"sumset has {len(current)} elements, above the cap {cap}")
    return FrequencySet(current, dim=theta.dim)


def sumset_growth_table(theta: FrequencySet, k_max: int, cap=DEFAULT_SUMSET_CAP):
    """Return a DataFrame with columns k, cardinality, trivial_bound, multiset_bound and
    arithmetic_count, the cardinality for an arithmetic progression of the same size.
    """
    if k_max < 1:
        raise MFCZInvalidParameter(f"k_max must be a positive integer: {k_max}")
    rows = []
    size = theta.size
    for k in range(1, k_max + 1):
        rows.append(
            {
                "k": k,
                "cardinality": sumset(theta, k, cap=cap).size,
                "trivial_bound": size**k,
                "multiset_bound": comb(size + k - 1, k),
                "arithmetic_count": k * (size - 1) + 1,
            }
        )
    return pd.DataFrame(rows)

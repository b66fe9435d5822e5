"""Reading and writing grid functions.

Two formats are supported, chosen by file extension:

- ``.csv``: a header line ``dim,L,M``, a line with those three values, then the table
  ``index,re,im`` with one row per grid point in C order.
- ``.bin``: three little-endian float64 values (dim, L, M) followed by the interleaved real
  and imaginary parts of the samples as little-endian float64, in C order.
"""

import io
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from mfcz.common import CSV_FLOAT_FORMAT
from mfcz.exceptions import MFCZInvalidFile
from mfcz.grid.torus import GridFunction, TorusDomain


logger = logging.getLogger(__name__)

HEADER_FIELDS = ("dim", "L", "M")
TABLE_COLUMNS = ("index", "re", "im")
_BINARY_DTYPE = np.dtype("<f8")


def write_grid_function(f: GridFunction, filename):
    """Write f to filename in the format given by its extension."""
    filename = Path(filename)
    match filename.suffix.lower():
        case ".csv":
            _write_csv(f, filename)
        case ".bin":
            _write_binary(f, filename)
        case _:
            raise MFCZInvalidFile(f"unsupported grid function format: {filename}")
    logger.debug("Wrote grid function to %s", filename)


def read_grid_function(filename) -> GridFunction:
    """Read a grid function written by :func:`write_grid_function`."""
    filename = Path(filename)
    if not filename.is_file():
        raise MFCZInvalidFile(f"{filename} is not a file")
    match filename.suffix.lower():
        case ".csv":
            f = _read_csv(filename)
        case ".bin":
            f = _read_binary(filename)
        case _:
            raise MFCZInvalidFile(f"unsupported grid function format: {filename}")
    logger.debug("Read grid function %s from %s", f, filename)
    return f


def _make_domain(dim, side_length, points_per_dim, filename) -> TorusDomain:
    try:
        return TorusDomain(
            dim=int(dim), side_length=float(side_length), points_per_dim=int(points_per_dim)
        )
    except ValueError as exc:
        raise MFCZInvalidFile(f"invalid grid header in {filename}: {exc}") from exc


def _write_csv(f: GridFunction, filename: Path):
    domain = f.domain
    values = f.values.reshape(-1)
    table = pd.DataFrame(
        {
            "index": np.arange(values.size),
            "re": np.real(values),
            "im": np.imag(values),
        }
    )
    with open(filename, "w", newline="") as f_out:
        f_out.write(",".join(HEADER_FIELDS) + "\n")
        f_out.write(f"{domain.dim},{domain.side_length!r},{domain.points_per_dim}\n")
        table.to_csv(f_out, index=False, float_format=CSV_FLOAT_FORMAT)


def _read_csv(filename: Path) -> GridFunction:
    lines = filename.read_text().splitlines()
    if len(lines) < 3 or lines[0].strip() != ",".join(HEADER_FIELDS):
        raise MFCZInvalidFile(f"{filename} does not start with the header {HEADER_FIELDS}")
    fields = lines[1].split(",")
    if len(fields) != len(HEADER_FIELDS):
        raise MFCZInvalidFile(f"invalid grid header in {filename}: {lines[1]}")
    domain = _make_domain(*fields, filename)
    try:
        table = pd.read_csv(io.StringIO("\n".join(lines[2:])))
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise MFCZInvalidFile(f"cannot parse {filename}: {exc}") from exc
    if tuple(table.columns) != TABLE_COLUMNS:
        raise MFCZInvalidFile(f"{filename} must have the columns {TABLE_COLUMNS}")
    if len(table) != domain.num_points:
        raise MFCZInvalidFile(
            f"{filename} holds {len(table)} samples; the header declares {domain.num_points}"
        )
    values = np.zeros(domain.num_points, dtype=complex)
    values[table["index"].to_numpy(dtype=int)] = table["re"].to_numpy() + 1j * table[
        "im"
    ].to_numpy()
    if not np.any(values.imag):
        values = values.real
    return GridFunction(domain, values.reshape(domain.shape))


def _write_binary(f: GridFunction, filename: Path):
    domain = f.domain
    header = np.array([domain.dim, domain.side_length, domain.points_per_dim], dtype=_BINARY_DTYPE)
    values = np.asarray(f.values, dtype=complex).reshape(-1)
    interleaved = np.empty(2 * values.size, dtype=_BINARY_DTYPE)
    interleaved[0::2] = values.real
    interleaved[1::2] = values.imag
    filename.write_bytes(header.tobytes() + interleaved.tobytes())


def _read_binary(filename: Path) -> GridFunction:
    data = np.frombuffer(filename.read_bytes(), dtype=_BINARY_DTYPE)
    if data.size < len(HEADER_FIELDS):
        raise MFCZInvalidFile(f"{filename} is too short to hold a grid header")
    domain = _make_domain(*data[: len(HEADER_FIELDS)], filename)
    body = data[len(HEADER_FIELDS) :]
    if body.size != 2 * domain.num_points:
        raise MFCZInvalidFile(
            f"{filename} holds {body.size // 2} samples; the header declares {domain.num_points}"
        )
    values = body[0::2] + 1j * body[1::2]
    if not np.any(values.imag):
        values = values.real
    return GridFunction(domain, values.reshape(domain.shape))

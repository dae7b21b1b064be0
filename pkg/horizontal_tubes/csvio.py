"""
CSV emission and parsing.

Floats are written with the shortest decimal that reads back to the
same double, so re-parsed values compare equal.
"""

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, TextIO, Tuple, Union

from horizontal_tubes.profile import ProfileCurve, ProfilePoint, TubeParams
from horizontal_tubes.utils import format_float

Cell = Union[float, int, str, bool, None]

PROFILE_HEADER = ("phi", "r", "h")


def _format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_rows(
    stream: TextIO,
    header: Sequence[str],
    rows: Iterable[Sequence[Cell]],
) -> None:
    """
    Write a header and rows.

    :param stream: text stream.
    :param header: column names.
    :param rows: row values.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(value) for value in row])


def write_profile_csv(curve: ProfileCurve, stream: TextIO) -> None:
    """
    Write a profile curve as ``phi,r,h`` rows.

    :param curve: sampled profile.
    :param stream: text stream.
    """
    write_rows(stream, PROFILE_HEADER, curve.samples)


def read_profile_csv(stream: TextIO, params: TubeParams) -> ProfileCurve:
    """
    Read a profile written by :func:`write_profile_csv`.

    :param stream: text stream.
    :param params: parameters the profile belongs to.
    :raises ValueError: if the header is not ``phi,r,h``.
    :return: profile curve.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(header) != PROFILE_HEADER:
        raise ValueError(f"Expected header {','.join(PROFILE_HEADER)}, got {header}")
    samples = tuple(
        ProfilePoint(float(phi), float(r_val), float(h_val))
        for phi, r_val, h_val in reader
    )
    return ProfileCurve(params, samples)


def read_overlay_csv(path: Path) -> List[Tuple[float, float]]:
    """
    Read an external ``volume,area`` curve.

    :param path: CSV file with a header naming ``volume`` and ``area``.
    :raises ValueError: if a column is missing.
    :return: (volume, area) pairs in file order.
    """
    with path.open(newline="", encoding="utf-8") as stream:
        reader = csv.DictReader(stream)
        fields = reader.fieldnames or []
        if "volume" not in fields or "area" not in fields:
            raise ValueError(f"{path} must have volume and area columns")
        return [(float(row["volume"]), float(row["area"])) for row in reader]

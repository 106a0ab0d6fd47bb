"""Utility functions for file I/O and plain-data encoding."""

import json
import math
from pathlib import Path
from typing import Any, Optional, TextIO

import numpy as np


# File I/O
def open_for_writing(path: str, newline: Optional[str] = None) -> TextIO:
    """Open path for writing text, creating missing parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target.open("w", newline=newline)


def read_json(path: str) -> Any:
    """Parse a JSON document from disk."""
    with open(path) as f:
        return json.load(f)


def write_json(path: str, data: Any) -> None:
    """Write data as indented JSON with a trailing newline."""
    with open_for_writing(path) as f:
        f.write(to_json(data))
        f.write("\n")


def to_json(data: Any) -> str:
    """Convert data to JSON string (numpy scalars and arrays included)."""
    return json.dumps(to_plain(data), indent=2, allow_nan=False)


def split_list(value: str) -> list[str]:
    """Split a comma list, dropping blanks."""
    return [item.strip() for item in value.split(",") if item.strip()]


# Plain-data encoding
def to_plain(obj: Any) -> Any:
    """
    Recursively convert numpy/complex values into JSON-safe plain data.

    Complex numbers become ``[re, im]`` pairs, arrays become nested lists.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def matrix_rows(mat: np.ndarray) -> list[list[list[float]]]:
    """Encode a complex matrix as rows of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def is_finite_number(value: Any) -> bool:
    """True for int/float values that are neither NaN nor infinite (bools excluded)."""
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(value)
    )

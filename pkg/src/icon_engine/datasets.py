"""Offline dataset fixtures (CSV snapshots shipped with the package)."""

from __future__ import annotations

import csv
from functools import lru_cache
from importlib import resources

from .errors import KernelError

AVAILABLE = ("wine", "iris")


@lru_cache(maxsize=None)
def load_dataset(name: str):
    """Returns (columns, rows): columns as (name, "number") pairs."""
    if name not in AVAILABLE:
        raise KernelError(f"unknown dataset {name!r}")
    ref = resources.files("icon_engine").joinpath(f"data/{name}.csv")
    with ref.open(encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = tuple(tuple(float(v) for v in row) for row in reader)
    columns = tuple((col, "number") for col in header)
    return columns, rows

"""Headless engine for an immersive computational-notebook workspace."""

from .errors import CommandError, CorruptLog, IconError, KernelError, SchemaError
from .grammar import CellKind, classify_cell, parse_source, render
from .notebook import (Cell, Notebook, Pose, Window, edit_cell,
                       layout_semicircle, load_notebook, save_notebook)
from .session import SEPARATED, UNIFIED, Session

__all__ = [
    "CommandError", "CorruptLog", "IconError", "KernelError", "SchemaError",
    "CellKind", "classify_cell", "parse_source", "render",
    "Cell", "Notebook", "Pose", "Window", "edit_cell", "layout_semicircle",
    "load_notebook", "save_notebook",
    "SEPARATED", "UNIFIED", "Session",
]

__version__ = "0.1.0"

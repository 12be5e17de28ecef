"""Notebook document: posed windows of classified cells, plus the file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import CommandError, SchemaError
from .grammar import CellKind, classify_cell

# Arena half-width in meters; artifact and window poses must stay inside.
WORKSPACE_HALF_EXTENT = 2.5


@dataclass
class Pose:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw: float = 0.0

    def validate(self, bounded: bool = True):
        vals = (self.x, self.y, self.z, self.yaw)
        if not all(math.isfinite(v) for v in vals):
            raise CommandError("PoseInvalid", "pose components must be finite")
        if bounded and (abs(self.x) > WORKSPACE_HALF_EXTENT
                        or abs(self.z) > WORKSPACE_HALF_EXTENT):
            raise CommandError(
                "PoseOutOfBounds",
                f"|x|,|z| must be <= {WORKSPACE_HALF_EXTENT} m")
        return self

    def to_dict(self):
        return {"x": self.x, "y": self.y, "z": self.z, "yaw": self.yaw}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["x"]), float(d["y"]), float(d["z"]), float(d["yaw"]))


@dataclass
class Cell:
    id: str
    source: str = ""
    kind: CellKind = CellKind.EMPTY
    dirty: bool = True

    def __post_init__(self):
        self.kind = classify_cell(self.source)


@dataclass
class Window:
    id: str
    cells: list = field(default_factory=list)
    pose: Pose = field(default_factory=Pose)


@dataclass
class Notebook:
    id: str
    windows: list = field(default_factory=list)
    dialect: str = "icon-cell-grammar"

    def __post_init__(self):
        self._check_unique_ids()

    def _check_unique_ids(self):
        wids = [w.id for w in self.windows]
        if len(set(wids)) != len(wids):
            raise SchemaError("/windows", "duplicate window ids")
        cids = [c.id for c in self.cells()]
        if len(set(cids)) != len(cids):
            raise SchemaError("/windows", "duplicate cell ids")

    def cells(self):
        """Global execution order: concatenation of window cell orders."""
        return [c for w in self.windows for c in w.cells]

    def cell(self, cell_id: str) -> Cell:
        for c in self.cells():
            if c.id == cell_id:
                return c
        raise CommandError("UnknownCell", f"no cell {cell_id!r}")

    def window_of(self, cell_id: str) -> Window:
        for w in self.windows:
            if any(c.id == cell_id for c in w.cells):
                return w
        raise CommandError("UnknownCell", f"no cell {cell_id!r}")

    def has_cell(self, cell_id: str) -> bool:
        return any(c.id == cell_id for c in self.cells())


def edit_cell(notebook: Notebook, cell_id: str, new_source: str) -> Cell:
    """Replace a cell's source; kind is re-derived and dirty always set."""
    cell = notebook.cell(cell_id)
    cell.source = new_source
    cell.kind = classify_cell(new_source)
    cell.dirty = True
    return cell


def layout_semicircle(notebook: Notebook, radius: float,
                      center: Pose | None = None) -> None:
    """Place windows at equal angular spacing across a 180-degree arc.

    Windows face the center pose. With one window it sits at the arc midpoint.
    Deterministic given the notebook and inputs.
    """
    if radius <= 0:
        raise CommandError("NonPositiveRadius", "radius must be > 0")
    center = center or Pose()
    n = len(notebook.windows)
    if n == 0:
        raise CommandError("NoWindows", "notebook has no windows")
    for i, window in enumerate(notebook.windows):
        # angle in [-90, +90] degrees relative to center yaw, endpoints included
        if n == 1:
            theta = 0.0
        else:
            theta = -math.pi / 2 + math.pi * i / (n - 1)
        angle = center.yaw + theta
        window.pose = Pose(
            x=center.x + radius * math.sin(angle),
            y=center.y,
            z=center.z + radius * math.cos(angle),
            yaw=angle + math.pi,  # face back toward the center
        )


# --- notebook file format -------------------------------------------------
# UTF-8 JSON: {id, dialect, windows:[{id, pose:{x,y,z,yaw},
#              cells:[{id, source, kind?}]}]}; kind recomputed on load.

def notebook_to_dict(nb: Notebook) -> dict:
    return {
        "id": nb.id,
        "dialect": nb.dialect,
        "windows": [
            {
                "id": w.id,
                "pose": w.pose.to_dict(),
                "cells": [
                    {"id": c.id, "source": c.source, "kind": c.kind.value}
                    for c in w.cells
                ],
            }
            for w in nb.windows
        ],
    }


def _require(cond, path, message):
    if not cond:
        raise SchemaError(path, message)


def notebook_from_dict(doc) -> Notebook:
    _require(isinstance(doc, dict), "/", "expected an object")
    _require(isinstance(doc.get("id"), str) and doc["id"], "/id",
             "id must be a non-empty string")
    _require(isinstance(doc.get("windows"), list), "/windows",
             "windows must be a list")
    dialect = doc.get("dialect", "icon-cell-grammar")
    _require(isinstance(dialect, str), "/dialect", "dialect must be a string")
    windows = []
    for i, w in enumerate(doc["windows"]):
        path = f"/windows/{i}"
        _require(isinstance(w, dict), path, "expected an object")
        _require(isinstance(w.get("id"), str) and w["id"], path + "/id",
                 "window id must be a non-empty string")
        pose = w.get("pose", {"x": 0, "y": 0, "z": 0, "yaw": 0})
        _require(isinstance(pose, dict), path + "/pose", "expected an object")
        for key in ("x", "y", "z", "yaw"):
            _require(isinstance(pose.get(key), (int, float)),
                     f"{path}/pose/{key}", "must be a number")
        _require(isinstance(w.get("cells"), list), path + "/cells",
                 "cells must be a list")
        cells = []
        for j, c in enumerate(w["cells"]):
            cpath = f"{path}/cells/{j}"
            _require(isinstance(c, dict), cpath, "expected an object")
            _require(isinstance(c.get("id"), str) and c["id"], cpath + "/id",
                     "cell id must be a non-empty string")
            _require(isinstance(c.get("source", ""), str), cpath + "/source",
                     "source must be a string")
            cells.append(Cell(id=c["id"], source=c.get("source", "")))
        windows.append(Window(id=w["id"], cells=cells, pose=Pose.from_dict(pose)))
    return Notebook(id=doc["id"], windows=windows, dialect=dialect)


def load_notebook(path) -> Notebook:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError("/", f"invalid JSON: {exc}") from exc
    return notebook_from_dict(doc)


def save_notebook(nb: Notebook, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(notebook_to_dict(nb), f, indent=2)
        f.write("\n")

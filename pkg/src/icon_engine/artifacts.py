"""Embodied artifacts: tables and visualizations pulled out of cells.

Edits are non-destructive: the base extract never changes, and the displayed
rows are always recomputed as removed-rows + filters + stable sort over it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import grammar as g
from .errors import CommandError
from .kernel import PlotExtract, TableExtract
from .notebook import Pose

SCATTER_KINDS = ("Scatter2D", "Scatter3D")


@dataclass
class TableArtifact:
    id: str
    extract: TableExtract
    pose: Pose
    origin_cell: str | None = None
    origin_var: str | None = None  # variable the extract came from
    sort_state: tuple | None = None  # (column, "asc"|"desc")
    row_filters: list = field(default_factory=list)  # (column, cmp, threshold)
    selected_columns: list = field(default_factory=list)  # insertion order
    removed_row_ids: set = field(default_factory=set)  # via apply_vis_to_table
    space: str = "artifact"  # placement when the session is in Separated mode

    def column_index(self, name: str) -> int:
        for i, (col, _) in enumerate(self.extract.columns):
            if col == name:
                return i
        raise CommandError("UnknownColumn", f"no column {name!r}")

    def column_dtype(self, name: str) -> str:
        return self.extract.columns[self.column_index(name)][1]

    def displayed(self):
        """(rows, row_ids) after removed rows, filters, then stable sort."""
        pairs = [(row, rid) for row, rid in
                 zip(self.extract.rows, self.extract.row_ids)
                 if rid not in self.removed_row_ids]
        for column, comparator, threshold in self.row_filters:
            idx = self.column_index(column)
            pairs = [(row, rid) for row, rid in pairs
                     if _compare(row[idx], comparator, threshold)]
        if self.sort_state is not None:
            column, direction = self.sort_state
            idx = self.column_index(column)
            pairs.sort(key=lambda p: p[0][idx], reverse=(direction == "desc"))
        rows = tuple(row for row, _ in pairs)
        row_ids = tuple(rid for _, rid in pairs)
        return rows, row_ids

    def displayed_extract(self) -> TableExtract:
        rows, row_ids = self.displayed()
        return TableExtract(self.extract.columns, rows, row_ids)


@dataclass
class VisArtifact:
    id: str
    kind: str  # Scatter2D | Scatter3D | NodeLink3D
    extract: PlotExtract
    pose: Pose
    origin_cell: str | None = None
    origin_table: str | None = None
    initial_row_ids: tuple = ()  # row ids present when the vis was created
    space: str = "artifact"

    def __post_init__(self):
        if not self.initial_row_ids:
            self.initial_row_ids = tuple(self.extract.row_ids)


@dataclass
class Link:
    source_id: str  # origin cell id, or origin table artifact id
    artifact_id: str


def _compare(value, comparator, threshold) -> bool:
    return {
        "<": value < threshold, "<=": value <= threshold,
        ">": value > threshold, ">=": value >= threshold,
        "==": value == threshold, "!=": value != threshold,
    }[comparator]


def sort_table(table: TableArtifact, column: str, direction: str) -> TableArtifact:
    if direction not in ("asc", "desc"):
        raise CommandError("BadDirection", f"direction {direction!r}")
    table.column_index(column)
    table.sort_state = (column, direction)
    return table


def filter_rows(table: TableArtifact, column: str, comparator: str,
                threshold: float) -> TableArtifact:
    if comparator not in g.COMPARATORS:
        raise CommandError("BadComparator", f"comparator {comparator!r}")
    if table.column_dtype(column) != g.NUMBER:
        raise CommandError("TypeMismatch", f"column {column!r} is not numeric")
    table.row_filters.append((column, comparator, float(threshold)))
    return table


def remove_filter(table: TableArtifact, index: int) -> TableArtifact:
    if not 0 <= index < len(table.row_filters):
        raise CommandError("BadIndex", f"no filter #{index}")
    del table.row_filters[index]
    return table


def select_column(table: TableArtifact, column: str) -> TableArtifact:
    table.column_index(column)
    if column in table.selected_columns:
        table.selected_columns.remove(column)
    else:
        table.selected_columns.append(column)
    return table


def merge_columns_to_vis(table: TableArtifact, col_a: str, col_b: str,
                         drop_pose: Pose, vis_id: str) -> VisArtifact:
    if col_a == col_b:
        raise CommandError("SameColumn", "columns must be distinct")
    for col in (col_a, col_b):
        if col not in table.selected_columns:
            raise CommandError("ColumnsNotSelected",
                               f"column {col!r} is not selected")
        if table.column_dtype(col) != g.NUMBER:
            raise CommandError("NonNumeric", f"column {col!r} is not numeric")
    rows, row_ids = table.displayed()
    ia, ib = table.column_index(col_a), table.column_index(col_b)
    points = tuple((row[ia], row[ib]) for row in rows)
    extract = PlotExtract("Scatter2D", (col_a, col_b), points,
                          tuple(0 for _ in points), row_ids)
    return VisArtifact(id=vis_id, kind="Scatter2D", extract=extract,
                       pose=drop_pose, origin_table=table.id,
                       space=table.space)


def add_axis(vis: VisArtifact, table: TableArtifact, column: str) -> VisArtifact:
    if vis.kind != "Scatter2D":
        raise CommandError("NotTwoD", "can only add an axis to a 2D scatter")
    if table.column_dtype(column) != g.NUMBER:
        raise CommandError("NonNumeric", f"column {column!r} is not numeric")
    rows, row_ids = table.displayed()
    idx = table.column_index(column)
    by_id = {rid: row[idx] for row, rid in zip(rows, row_ids)}
    if set(vis.extract.row_ids) - set(by_id):
        raise CommandError("ArityMismatch",
                           "table rows do not cover the plotted points")
    e = vis.extract
    points = tuple(p + (by_id[rid],) for p, rid in zip(e.points, e.row_ids))
    vis.extract = PlotExtract("Scatter3D", e.axis_names + (column,), points,
                              e.colors, e.row_ids)
    vis.kind = "Scatter3D"
    return vis


def remove_axis(vis: VisArtifact, axis_index: int) -> VisArtifact:
    if vis.kind != "Scatter3D":
        raise CommandError("NotThreeD", "artifact does not have 3 axes")
    if not 0 <= axis_index < 3:
        raise CommandError("BadIndex", f"no axis #{axis_index}")
    e = vis.extract
    keep = [i for i in range(3) if i != axis_index]
    points = tuple(tuple(p[i] for i in keep) for p in e.points)
    axes = tuple(e.axis_names[i] for i in keep)
    vis.extract = PlotExtract("Scatter2D", axes, points, e.colors, e.row_ids)
    vis.kind = "Scatter2D"
    return vis


def remove_point(vis: VisArtifact, point_index: int) -> VisArtifact:
    e = vis.extract
    if not 0 <= point_index < len(e.points):
        raise CommandError("BadIndex", f"no point #{point_index}")
    keep = [i for i in range(len(e.points)) if i != point_index]
    remap = {old: new for new, old in enumerate(keep)}
    edges = tuple((remap[i], remap[j]) for i, j in e.edges
                  if i != point_index and j != point_index)
    vis.extract = PlotExtract(
        e.kind, e.axis_names,
        tuple(e.points[i] for i in keep),
        tuple(e.colors[i] for i in keep),
        tuple(e.row_ids[i] for i in keep),
        edges, e.knn_k)
    return vis


def apply_vis_to_table(vis: VisArtifact, table: TableArtifact) -> TableArtifact:
    if vis.origin_table != table.id:
        raise CommandError("OriginMismatch",
                           "visualization was not merged from this table")
    removed = set(vis.initial_row_ids) - set(vis.extract.row_ids)
    table.removed_row_ids |= removed
    return table

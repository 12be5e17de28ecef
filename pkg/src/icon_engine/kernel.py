"""In-process mock kernel: evaluates the cell grammar deterministically.

Holds a flat variable environment shared across cells (notebook execution
semantics: running a cell mutates the environment; later cells see it).
Executions are atomic - a failing cell leaves the environment untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import grammar as g
from .datasets import load_dataset
from .errors import KernelError
from .kernels import kmeans, knn_graph

KMEANS_ITERS = 50  # fixed Lloyd iteration cap for grammar-level kmeans calls


@dataclass(frozen=True)
class TableValue:
    columns: tuple  # ((name, dtype), ...)
    rows: tuple  # tuple of row tuples
    row_ids: tuple  # stable hidden ids, parallel to rows

    def column_index(self, name: str) -> int:
        for i, (col, _) in enumerate(self.columns):
            if col == name:
                return i
        raise KernelError(f"unknown column {name!r}")

    def numeric_columns(self):
        return [(i, name) for i, (name, dtype) in enumerate(self.columns)
                if dtype == g.NUMBER]


@dataclass(frozen=True)
class LabelsValue:
    labels: tuple  # per-row cluster labels


@dataclass(frozen=True)
class TableExtract:
    columns: tuple  # ((name, dtype), ...)
    rows: tuple
    row_ids: tuple

    @property
    def shape(self):
        return len(self.rows), len(self.columns)


@dataclass(frozen=True)
class PlotExtract:
    kind: str  # Scatter2D | Scatter3D | NodeLink3D
    axis_names: tuple
    points: tuple  # tuple of 2- or 3-tuples
    colors: tuple  # per-point cluster label
    row_ids: tuple  # source row ids, parallel to points
    edges: tuple = ()  # (i, j) pairs, NodeLink3D only
    knn_k: int = 0  # neighbor count a NodeLink3D was built with


@dataclass
class ExecResult:
    cell_id: str
    status: str  # "Ok" | "Error"
    message: str = ""
    defined_vars: list = field(default_factory=list)
    display: PlotExtract | None = None


def _fresh_table(columns, rows) -> TableValue:
    return TableValue(tuple(columns), tuple(rows), tuple(range(len(rows))))


def _compare(value: float, comparator: str, threshold: float) -> bool:
    if comparator == "<":
        return value < threshold
    if comparator == "<=":
        return value <= threshold
    if comparator == ">":
        return value > threshold
    if comparator == ">=":
        return value >= threshold
    if comparator == "==":
        return value == threshold
    if comparator == "!=":
        return value != threshold
    raise KernelError(f"unknown comparator {comparator!r}")


class MockKernel:
    def __init__(self):
        self.env: dict = {}

    def reset(self):
        self.env = {}

    # -- helpers -----------------------------------------------------------

    def _table(self, env, name: str) -> TableValue:
        value = self._lookup(env, name)
        if not isinstance(value, TableValue):
            raise KernelError(f"NotTabular: {name!r} is not a table")
        return value

    @staticmethod
    def _lookup(env, name: str):
        if name not in env:
            raise KernelError(f"undefined variable {name!r}")
        return env[name]

    def _resolve_k(self, env, k) -> int:
        if isinstance(k, int):
            return k
        value = self._lookup(env, k)
        if not isinstance(value, int):
            raise KernelError(f"parameter {k!r} is not an integer")
        return value

    @staticmethod
    def _matrix(table: TableValue, columns=None):
        """Numeric point matrix plus the column names used."""
        if columns is None:
            numeric = table.numeric_columns()
        else:
            numeric = [(table.column_index(c), c) for c in columns]
        for i, name in numeric:
            if table.columns[i][1] != g.NUMBER:
                raise KernelError(f"column {name!r} is not numeric")
        points = [tuple(row[i] for i, _ in numeric) for row in table.rows]
        return points, [name for _, name in numeric]

    def _colors_for(self, env, color, n: int):
        if color is None:
            return tuple(0 for _ in range(n))
        if isinstance(color, g.VarRef):
            value = self._lookup(env, color.name)
            if not isinstance(value, LabelsValue):
                raise KernelError(f"{color.name!r} is not a label vector")
            labels = value.labels
        else:
            labels = tuple(color)
        if len(labels) != n:
            raise KernelError(
                f"color vector length {len(labels)} != point count {n}")
        return tuple(int(v) for v in labels)

    # -- statement evaluation ---------------------------------------------

    def _eval(self, env, stmt):
        """Mutates env; returns a PlotExtract for display statements."""
        if isinstance(stmt, g.LoadDataset):
            columns, rows = load_dataset(stmt.dataset)
            env[stmt.var] = _fresh_table(columns, rows)
            return None
        if isinstance(stmt, g.Assign):
            if isinstance(stmt.expr, g.VarRef):
                env[stmt.var] = self._lookup(env, stmt.expr.name)
            else:
                env[stmt.var] = _fresh_table(stmt.expr.columns, stmt.expr.rows)
            return None
        if isinstance(stmt, g.FilterExpr):
            table = self._table(env, stmt.source)
            idx = table.column_index(stmt.column)
            if table.columns[idx][1] != g.NUMBER:
                raise KernelError(f"column {stmt.column!r} is not numeric")
            keep = [i for i, row in enumerate(table.rows)
                    if _compare(row[idx], stmt.comparator, stmt.threshold)]
            env[stmt.var] = TableValue(
                table.columns,
                tuple(table.rows[i] for i in keep),
                tuple(table.row_ids[i] for i in keep))
            return None
        if isinstance(stmt, g.SelectCols):
            table = self._table(env, stmt.source)
            idxs = [table.column_index(c) for c in stmt.cols]
            env[stmt.var] = TableValue(
                tuple(table.columns[i] for i in idxs),
                tuple(tuple(row[i] for i in idxs) for row in table.rows),
                table.row_ids)
            return None
        if isinstance(stmt, g.ParamDecl):
            if not stmt.low <= stmt.value <= stmt.high:
                raise KernelError(
                    f"{stmt.name}={stmt.value} outside range "
                    f"{stmt.low}..{stmt.high}")
            env[stmt.name] = stmt.value
            return None
        if isinstance(stmt, g.KMeans):
            table = self._table(env, stmt.source)
            k = self._resolve_k(env, stmt.k)
            points, _ = self._matrix(table)
            try:
                labels = kmeans(points, k, KMEANS_ITERS)
            except KernelError:
                raise
            env[stmt.var] = LabelsValue(tuple(labels))
            return None
        if isinstance(stmt, g.PlotScatter):
            table = self._table(env, stmt.source)
            points, names = self._matrix(table, stmt.cols)
            colors = self._colors_for(env, stmt.color, len(points))
            kind = "Scatter2D" if len(stmt.cols) == 2 else "Scatter3D"
            return PlotExtract(kind, tuple(names), tuple(points), colors,
                               table.row_ids)
        if isinstance(stmt, g.KnnGraph):
            table = self._table(env, stmt.source)
            k = self._resolve_k(env, stmt.k)
            numeric = table.numeric_columns()
            if len(numeric) < 3:
                raise KernelError(
                    "node-link display needs at least 3 numeric columns")
            coords = [name for _, name in numeric[:3]]
            points, names = self._matrix(table, coords)
            edges = knn_graph(points, k)
            colors = tuple(0 for _ in points)
            return PlotExtract("NodeLink3D", tuple(names), tuple(points),
                               colors, table.row_ids, tuple(edges), k)
        if isinstance(stmt, g.Opaque):
            return None  # comments and unknown lines are inert
        raise KernelError(f"cannot execute statement {stmt!r}")

    # -- public API --------------------------------------------------------

    def execute_source(self, cell_id: str, source: str) -> ExecResult:
        """Run a cell's statements; commit the environment only on success."""
        statements = g.parse_source(source)
        scratch = dict(self.env)
        display = None
        try:
            for stmt in statements:
                result = self._eval(scratch, stmt)
                if result is not None:
                    display = result
        except KernelError as exc:
            return ExecResult(cell_id, "Error", str(exc))
        self.env = scratch
        return ExecResult(cell_id, "Ok",
                          defined_vars=g.defined_variables(statements),
                          display=display)

    def extract_table(self, var: str) -> TableExtract:
        table = self._table(self.env, var)
        return TableExtract(table.columns, table.rows, table.row_ids)

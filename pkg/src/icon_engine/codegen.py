"""Low-code generation: artifact state back into cell-grammar source.

Create writes a fresh variable into an empty cell; Update rewrites the
artifact's origin cell as a canonical literal reassignment. Either way the
emitted source re-executes to exactly the artifact's displayed state
(numbers keep shortest round-trip decimal form via repr).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import grammar as g
from .artifacts import TableArtifact, VisArtifact
from .errors import CommandError
from .notebook import Notebook

_FRESH_RE = re.compile(r"^df(\d+)$")


@dataclass
class CodegenResult:
    cell_id: str
    new_source: str
    mode: str  # "Create" | "Update"
    variable: str


def _used_variables(notebook: Notebook):
    used = set()
    for cell in notebook.cells():
        for stmt in g.parse_source(cell.source):
            used.update(g.defined_variables([stmt]))
            # referenced names count too, so generated code never shadows
            for attr in ("source",):
                name = getattr(stmt, attr, None)
                if isinstance(name, str):
                    used.add(name)
    return used


def name_fresh_variable(notebook: Notebook) -> str:
    used = {int(m.group(1)) for v in _used_variables(notebook)
            if (m := _FRESH_RE.match(v))}
    n = 1
    while n in used:
        n += 1
    return f"df{n}"


def _table_statements(variable: str, artifact: TableArtifact):
    extract = artifact.displayed_extract()
    return [g.Assign(variable, g.TableLiteral(extract.columns, extract.rows))]


def _vis_statements(variable: str, artifact: VisArtifact):
    e = artifact.extract
    columns = tuple((name, g.NUMBER) for name in e.axis_names)
    rows = tuple(tuple(p) for p in e.points)
    stmts = [g.Assign(variable, g.TableLiteral(columns, rows))]
    if artifact.kind in ("Scatter2D", "Scatter3D"):
        stmts.append(g.PlotScatter(variable, e.axis_names, tuple(e.colors)))
    elif artifact.kind == "NodeLink3D":
        # edges are re-derived from the data on execution
        stmts.append(g.KnnGraph(variable, e.knn_k))
    else:
        raise CommandError("UnknownArtifact", f"kind {artifact.kind!r}")
    return stmts


def _statements_for(variable: str, artifact):
    if isinstance(artifact, TableArtifact):
        return _table_statements(variable, artifact)
    return _vis_statements(variable, artifact)


def generate_create(artifact, notebook: Notebook, cell_id: str) -> CodegenResult:
    cell = notebook.cell(cell_id)
    if cell.kind != g.CellKind.EMPTY:
        raise CommandError("TargetNotEmpty", f"cell {cell_id!r} is not empty")
    variable = name_fresh_variable(notebook)
    source = g.render(_statements_for(variable, artifact))
    return CodegenResult(cell_id, source, "Create", variable)


def generate_update(artifact, notebook: Notebook, cell_id: str) -> CodegenResult:
    if artifact.origin_cell != cell_id:
        raise CommandError("OriginMismatch",
                           f"cell {cell_id!r} is not the artifact's origin")
    cell = notebook.cell(cell_id)
    old = g.parse_source(cell.source)
    opaque = [s for s in old if isinstance(s, g.Opaque)]
    if isinstance(artifact, TableArtifact):
        defined = g.defined_variables(old)
        if len(defined) != 1:
            raise CommandError(
                "AmbiguousVariable",
                f"origin cell defines {len(defined)} variables, need exactly 1")
        variable = defined[0]
    else:
        # a plot cell binds nothing; rewrite it around a fresh data variable
        variable = name_fresh_variable(notebook)
    statements = opaque + _statements_for(variable, artifact)
    return CodegenResult(cell_id, g.render(statements), "Update", variable)

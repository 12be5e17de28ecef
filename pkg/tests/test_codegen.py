import random

import pytest

from icon_engine import artifacts as art
from icon_engine import grammar as g
from icon_engine.codegen import (generate_create, generate_update,
                                 name_fresh_variable)
from icon_engine.errors import CommandError
from icon_engine.kernel import MockKernel, PlotExtract, TableExtract
from icon_engine.notebook import Cell, Notebook, Pose, Window


def nb_with(*cells):
    return Notebook(id="nb", windows=[Window(id="w", cells=list(cells))])


def table_artifact(columns, rows, origin=None, var=None):
    extract = TableExtract(
        tuple(columns), tuple(tuple(r) for r in rows),
        tuple(range(len(rows))))
    return art.TableArtifact(id="t1", extract=extract, pose=Pose(),
                             origin_cell=origin, origin_var=var)


def reexecute(source, variable):
    """Oracle: run the generated cell in a fresh kernel, extract the table."""
    kernel = MockKernel()
    result = kernel.execute_source("gen", source)
    assert result.status == "Ok", result.message
    return kernel, kernel.extract_table(variable)


def test_fresh_variable_skips_used_names():
    nb = nb_with(Cell(id="a", source="df1 = df3[df3['x'] < 1.0]"),
                 Cell(id="b", source="df2 = load_dataset('wine')"))
    # df3 is only referenced, never defined, but still counts as taken
    assert name_fresh_variable(nb) == "df4"
    assert name_fresh_variable(nb_with(Cell(id="a", source=""))) == "df1"


def test_create_emits_runnable_literal():
    nb = nb_with(Cell(id="empty", source=""))
    artifact = table_artifact([("a", "number")], [[1.5], [2.5]])
    result = generate_create(artifact, nb, "empty")
    assert result.mode == "Create" and result.variable == "df1"
    _, extract = reexecute(result.new_source, "df1")
    assert extract == artifact.displayed_extract()


def test_create_requires_empty_cell():
    nb = nb_with(Cell(id="c", source="k = 3  # range: 2..8"))
    with pytest.raises(CommandError) as exc:
        generate_create(table_artifact([("a", "number")], [[1.0]]), nb, "c")
    assert exc.value.code == "TargetNotEmpty"


def test_create_reflects_sort_and_filter():
    nb = nb_with(Cell(id="empty", source=""))
    artifact = table_artifact([("a", "number")], [[3.0], [1.0], [9.0]])
    art.filter_rows(artifact, "a", "<=", 5.0)
    art.sort_table(artifact, "a", "asc")
    result = generate_create(artifact, nb, "empty")
    _, extract = reexecute(result.new_source, result.variable)
    assert [r[0] for r in extract.rows] == [1.0, 3.0]


def test_update_rewrites_origin_cell():
    source = 'df = load_dataset("wine")'
    nb = nb_with(Cell(id="orig", source=source))
    artifact = table_artifact([("a", "number")], [[7.0]],
                              origin="orig", var="df")
    result = generate_update(artifact, nb, "orig")
    assert result.mode == "Update" and result.variable == "df"
    stmts = g.parse_source(result.new_source)
    assert len(stmts) == 1 and isinstance(stmts[0], g.Assign)
    _, extract = reexecute(result.new_source, "df")
    assert extract.rows == ((7.0,),)


def test_update_preserves_opaque_lines():
    source = "# tuning notes\ndf = load_dataset('wine')"
    nb = nb_with(Cell(id="orig", source=source))
    artifact = table_artifact([("a", "number")], [[7.0]], origin="orig")
    result = generate_update(artifact, nb, "orig")
    lines = result.new_source.splitlines()
    assert lines[0] == "# tuning notes"
    assert g.parse_line(lines[1]) == g.Assign(
        "df", g.TableLiteral((("a", "number"),), ((7.0,),)))


def test_update_origin_mismatch_and_ambiguity():
    nb = nb_with(Cell(id="orig", source="a = load_dataset('wine')\n"
                                        "b = a[['alcohol']]"),
                 Cell(id="other", source=""))
    artifact = table_artifact([("a", "number")], [[1.0]], origin="orig")
    with pytest.raises(CommandError) as exc:
        generate_update(artifact, nb, "other")
    assert exc.value.code == "OriginMismatch"
    with pytest.raises(CommandError) as exc:
        generate_update(artifact, nb, "orig")
    assert exc.value.code == "AmbiguousVariable"


def scatter_artifact(points, colors, origin=None):
    dim = len(points[0]) if points else 2
    kind = "Scatter3D" if dim == 3 else "Scatter2D"
    extract = PlotExtract(kind, tuple(f"ax{i}" for i in range(dim)),
                          tuple(tuple(p) for p in points), tuple(colors),
                          tuple(range(len(points))))
    return art.VisArtifact(id="v1", kind=kind, extract=extract, pose=Pose(),
                           origin_cell=origin)


def test_scatter_create_roundtrip():
    nb = nb_with(Cell(id="empty", source=""))
    artifact = scatter_artifact([(1.0, 2.0), (3.0, 4.0)], [0, 1])
    result = generate_create(artifact, nb, "empty")
    kernel = MockKernel()
    exec_result = kernel.execute_source("gen", result.new_source)
    assert exec_result.status == "Ok"
    display = exec_result.display
    assert display.kind == "Scatter2D"
    assert display.points == artifact.extract.points
    assert display.colors == artifact.extract.colors


def test_vis_update_uses_fresh_variable():
    nb = nb_with(Cell(id="orig", source='plt.scatter(df["a"], df["b"])'))
    artifact = scatter_artifact([(1.0, 2.0)], [0], origin="orig")
    result = generate_update(artifact, nb, "orig")
    assert result.variable == "df1"
    kernel = MockKernel()
    assert kernel.execute_source("gen", result.new_source).status == "Ok"


def test_nodelink_create_rederives_edges():
    nb = nb_with(Cell(id="empty", source=""))
    extract = PlotExtract(
        "NodeLink3D", ("x", "y", "z"),
        ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (3.0, 0.0, 0.0)),
        (0, 0, 0), (0, 1, 2), ((0, 1), (1, 0), (2, 1)), 1)
    artifact = art.VisArtifact(id="v1", kind="NodeLink3D", extract=extract,
                               pose=Pose())
    result = generate_create(artifact, nb, "empty")
    kernel = MockKernel()
    exec_result = kernel.execute_source("gen", result.new_source)
    assert exec_result.status == "Ok"
    assert exec_result.display.edges == extract.edges
    assert exec_result.display.knn_k == 1


def random_table_artifact(rnd):
    ncols = rnd.randrange(1, 5)
    nrows = rnd.randrange(0, 12)
    columns = [(f"col{i}", "number") for i in range(ncols)]
    rows = [[round(rnd.uniform(-50, 50), 3) for _ in range(ncols)]
            for _ in range(nrows)]
    artifact = table_artifact(columns, rows)
    if nrows and rnd.random() < 0.5:
        col = f"col{rnd.randrange(ncols)}"
        artifact.row_filters.append(
            (col, rnd.choice(["<", "<=", ">", ">="]), rnd.uniform(-50, 50)))
    if nrows and rnd.random() < 0.5:
        artifact.sort_state = (f"col{rnd.randrange(ncols)}",
                               rnd.choice(["asc", "desc"]))
    return artifact


def test_fuzz_table_roundtrip_exact():
    rnd = random.Random(2024)
    nb = nb_with(Cell(id="empty", source=""))
    for _ in range(100):
        artifact = random_table_artifact(rnd)
        result = generate_create(artifact, nb, "empty")
        _, extract = reexecute(result.new_source, result.variable)
        assert extract.columns == artifact.extract.columns
        assert extract.rows == artifact.displayed()[0]

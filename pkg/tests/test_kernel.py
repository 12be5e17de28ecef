import pytest

from icon_engine.datasets import load_dataset
from icon_engine.kernel import MockKernel


@pytest.fixture
def kernel():
    return MockKernel()


def run(kernel, source, cell_id="c"):
    return kernel.execute_source(cell_id, source)


def test_load_defines_variable(kernel):
    result = run(kernel, 'df = load_dataset("wine")')
    assert result.status == "Ok"
    assert result.defined_vars == ["df"]
    assert kernel.extract_table("df").shape == (178, 13)


def test_iris_shape(kernel):
    run(kernel, 'di = load_dataset("iris")')
    assert kernel.extract_table("di").shape == (150, 4)


def test_undefined_variable_is_error_not_crash(kernel):
    result = run(kernel, 'df2 = df[df["a"] < 1.0]')
    assert result.status == "Error"
    assert "undefined variable" in result.message
    assert result.defined_vars == []
    assert kernel.env == {}


def test_failed_cell_commits_nothing(kernel):
    result = run(kernel, 'a = load_dataset("wine")\nb = nope')
    assert result.status == "Error"
    assert "a" not in kernel.env


def test_load_filter_scatter_pipeline(kernel):
    result = run(kernel, 'df = load_dataset("wine")\n'
                         'df2 = df[df["alcohol"] <= 13.0]\n'
                         'plt.scatter(df2["alcohol"], df2["hue"])')
    assert result.status == "Ok"
    assert result.display is not None
    assert result.display.kind == "Scatter2D"
    assert result.display.axis_names == ("alcohol", "hue")
    _, rows = load_dataset("wine")
    expected = [(r[0], r[10]) for r in rows if r[0] <= 13.0]
    assert list(result.display.points) == expected


def test_extraction_faithful_to_fixture(kernel):
    run(kernel, 'df = load_dataset("wine")')
    columns, rows = load_dataset("wine")
    extract = kernel.extract_table("df")
    assert extract.columns == columns
    assert extract.rows == rows
    assert extract.row_ids == tuple(range(178))


def test_select_cols_and_table_literal(kernel):
    run(kernel, "t = table(columns=['a:number', 'b:number'], "
                "rows=[[1.0, 2.0], [3.0, 4.0]])\n"
                "s = t[['b']]")
    assert kernel.extract_table("s").rows == ((2.0,), (4.0,))


def test_empty_table_keeps_declared_columns(kernel):
    run(kernel, "t = table(columns=['a:number', 'b:text'], rows=[])")
    extract = kernel.extract_table("t")
    assert extract.shape == (0, 2)
    assert extract.columns == (("a", "number"), ("b", "text"))


def test_param_decl_binds_and_enforces_range(kernel):
    assert run(kernel, "k = 3  # range: 2..8").status == "Ok"
    assert kernel.env["k"] == 3
    assert run(kernel, "k = 9  # range: 2..8").status == "Error"
    assert kernel.env["k"] == 3


def test_kmeans_colors_scatter(kernel):
    run(kernel, "t = table(columns=['x:number', 'y:number'], "
                "rows=[[0.0, 0.0], [0.0, 1.0], [9.0, 0.0], [9.0, 1.0]])")
    result = run(kernel, "labels = kmeans(t, k=2)\n"
                         "plt.scatter(t['x'], t['y'], c=labels)")
    assert result.status == "Ok"
    assert result.display.colors == (0, 0, 1, 1)


def test_kmeans_k1_single_color(kernel):
    run(kernel, "t = table(columns=['x:number', 'y:number'], "
                "rows=[[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]])")
    result = run(kernel, "labels = kmeans(t, k=1)\n"
                         "plt.scatter(t['x'], t['y'], c=labels)")
    assert set(result.display.colors) == {0}


def test_knn_display_three_points(kernel):
    run(kernel, "t = table(columns=['x:number', 'y:number', 'z:number'], "
                "rows=[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0]])")
    result = run(kernel, "knn_graph(t, k=1)")
    assert result.status == "Ok"
    display = result.display
    assert display.kind == "NodeLink3D"
    assert len(display.edges) == 3
    assert display.edges == ((0, 1), (1, 0), (2, 1))
    assert display.knn_k == 1


def test_knn_k_via_param(kernel):
    run(kernel, "k_nn = 1  # range: 1..4")
    run(kernel, "t = table(columns=['x:number', 'y:number', 'z:number'], "
                "rows=[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0]])")
    result = run(kernel, "knn_graph(t, k=k_nn)")
    assert len(result.display.edges) == 3


def test_determinism_bit_for_bit(kernel):
    sources = ['df = load_dataset("iris")',
               'ds = di2 if False else df',  # opaque line, ignored
               "labels = kmeans(df, k=3)",
               'plt.scatter(df["sepal_length"], df["sepal_width"], c=labels)']
    k2 = MockKernel()
    for src in sources:
        r1 = kernel.execute_source("c", src)
        r2 = k2.execute_source("c", src)
        assert (r1.status, r1.display) == (r2.status, r2.display)
    assert kernel.env == k2.env


def test_reset_clears_environment(kernel):
    run(kernel, 'df = load_dataset("wine")')
    kernel.reset()
    result = run(kernel, 'plt.scatter(df["alcohol"], df["hue"])')
    assert result.status == "Error"

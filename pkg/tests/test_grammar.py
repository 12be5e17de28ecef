import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icon_engine import grammar as g


def test_load_dataset_single_production():
    assert g.parse_source('df = load_dataset("wine")') == [
        g.LoadDataset("df", "wine")]


def test_empty_source_parses_to_nothing():
    assert g.parse_source("") == []


def test_comment_line_is_opaque():
    stmts = g.parse_source("plt.scatter(df['a'], df['b'])\n# note")
    assert stmts == [g.PlotScatter("df", ("a", "b")), g.Opaque("# note")]


def test_unrecognized_lines_never_fail():
    weird = "import os\nos.system('x')\nlambda: ???\n\x00\xff"
    stmts = g.parse_source(weird)
    assert all(isinstance(s, g.Opaque) for s in stmts)
    assert g.render(stmts) == weird


def test_param_decl_roundtrip():
    line = "k_means = 3  # range: 2..8"
    stmt = g.parse_source(line)[0]
    assert stmt == g.ParamDecl("k_means", 3, 2, 8)
    assert g.render_statement(stmt) == line


def test_filter_inner_var_must_match_source():
    assert isinstance(g.parse_source('a = b[c["x"] < 1]')[0], g.Opaque)
    assert isinstance(g.parse_source('a = b[b["x"] < 1]')[0], g.FilterExpr)


def test_table_literal():
    line = "df1 = table(columns=['x:number', 'n:text'], rows=[[1.5, 'a'], [2.5, 'b']])"
    stmt = g.parse_source(line)[0]
    assert stmt == g.Assign("df1", g.TableLiteral(
        (("x", g.NUMBER), ("n", g.TEXT)), ((1.5, "a"), (2.5, "b"))))
    assert g.render_statement(stmt) == line


def test_malformed_table_literal_degrades_to_opaque():
    for bad in ("df1 = table(columns=['x'], rows=[[1]])",
                "df1 = table(columns=['x:number'], rows=[[1, 2]])",
                "df1 = table(columns=['x:number'], rows=[['text']])"):
        assert isinstance(g.parse_source(bad)[0], g.Opaque)


def test_scatter_variants():
    assert g.parse_source('plt.scatter(df["a"], df["b"], df["c"])')[0] == \
        g.PlotScatter("df", ("a", "b", "c"))
    assert g.parse_source('plt.scatter(df["a"], df["b"], c=labels)')[0] == \
        g.PlotScatter("df", ("a", "b"), g.VarRef("labels"))
    assert g.parse_source('plt.scatter(df["a"], df["b"], c=[0, 1])')[0] == \
        g.PlotScatter("df", ("a", "b"), (0, 1))
    # mixed source frames are not a grammar production
    assert isinstance(g.parse_source('plt.scatter(df["a"], e["b"])')[0],
                      g.Opaque)


def test_knn_and_kmeans():
    assert g.parse_source("knn_graph(df, k=2)")[0] == g.KnnGraph("df", 2)
    assert g.parse_source("knn_graph(df, k=k_nn)")[0] == g.KnnGraph("df", "k_nn")
    assert g.parse_source("labels = kmeans(df, k=3)")[0] == \
        g.KMeans("labels", "df", 3)


# --- grammar fuzzer: parse(render(ast)) == ast ---------------------------

_NAMES = st.sampled_from(["df", "df1", "data", "t_2", "x"])
_COLS = st.sampled_from(["a", "b", "col_c", "hue", "alcohol"])
_FLOATS = st.floats(allow_nan=False, allow_infinity=False, width=64)
_K = st.one_of(st.integers(min_value=1, max_value=9),
               st.sampled_from(["k_means", "k_nn"]))


def _table_literals():
    def build(names, dtypes, rows):
        cols = tuple(zip(names, dtypes))
        vals = tuple(
            tuple(float(r[i]) if dt == g.NUMBER else f"s{int(r[i])}"
                  for i, (_, dt) in enumerate(cols))
            for r in rows)
        return g.TableLiteral(cols, vals)

    return st.integers(min_value=1, max_value=4).flatmap(
        lambda width: st.builds(
            build,
            st.lists(_COLS, min_size=width, max_size=width, unique=True),
            st.lists(st.sampled_from([g.NUMBER, g.TEXT]), min_size=width,
                     max_size=width),
            st.lists(st.lists(_FLOATS, min_size=width, max_size=width),
                     min_size=0, max_size=5)))


_STATEMENTS = st.one_of(
    st.builds(g.LoadDataset, _NAMES, st.sampled_from(["wine", "iris"])),
    st.builds(g.Assign, _NAMES, st.builds(g.VarRef, _NAMES)),
    st.builds(g.Assign, _NAMES, _table_literals()),
    st.builds(g.FilterExpr, _NAMES, _NAMES, _COLS,
              st.sampled_from(g.COMPARATORS), _FLOATS),
    st.builds(lambda v, s, cols: g.SelectCols(v, s, tuple(cols)),
              _NAMES, _NAMES,
              st.lists(_COLS, min_size=1, max_size=3, unique=True)),
    st.builds(lambda s, cols, color: g.PlotScatter(s, tuple(cols), color),
              _NAMES, st.lists(_COLS, min_size=2, max_size=3),
              st.one_of(st.none(), st.builds(g.VarRef, _NAMES),
                        st.lists(st.integers(0, 9), max_size=4).map(tuple))),
    st.builds(g.KMeans, _NAMES, _NAMES, _K),
    st.builds(g.KnnGraph, _NAMES, _K),
    st.builds(g.ParamDecl, _NAMES, st.integers(0, 99), st.integers(0, 9),
              st.integers(10, 99)),
    st.builds(g.Opaque, st.sampled_from(
        ["# comment", "pass", "print(df)", "  indented", "x = ???"])),
)


@settings(max_examples=300, deadline=None)
@given(st.lists(_STATEMENTS, max_size=8))
def test_parse_render_roundtrip(statements):
    assert g.parse_source(g.render(statements)) == statements


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)),
               max_size=200))
def test_classification_total_and_stable(source):
    kind = g.classify_cell(source)
    assert kind in set(g.CellKind)
    rendered = g.render(g.parse_source(source))
    assert g.classify_cell(rendered) == kind


def test_classification_precedence_and_examples():
    assert g.classify_cell('df = load_dataset("iris")') == g.CellKind.DATA
    assert g.classify_cell("   ") == g.CellKind.EMPTY
    assert g.classify_cell(
        "df2 = df[df['hue'] <= 3.0]\nplt.scatter(df2['a'], df2['b'])") == \
        g.CellKind.VISUALIZATION
    assert g.classify_cell("# only a comment") == g.CellKind.CODE
    assert g.classify_cell("k = 3  # range: 2..8") == g.CellKind.CODE

import random

import pytest

from icon_engine import artifacts as art
from icon_engine.datasets import load_dataset
from icon_engine.errors import CommandError
from icon_engine.kernel import TableExtract
from icon_engine.notebook import Pose


def make_table(columns, rows, table_id="t1"):
    extract = TableExtract(
        tuple(columns), tuple(tuple(r) for r in rows),
        tuple(range(len(rows))))
    return art.TableArtifact(id=table_id, extract=extract, pose=Pose())


@pytest.fixture
def numbers():
    return make_table([("c", "number")], [[3.0], [1.0], [2.0]])


def test_sort_asc_puts_min_first(numbers):
    art.sort_table(numbers, "c", "asc")
    rows, _ = numbers.displayed()
    assert [r[0] for r in rows] == [1.0, 2.0, 3.0]
    assert numbers.extract.rows == ((3.0,), (1.0,), (2.0,))  # base untouched


def test_sort_idempotent(numbers):
    art.sort_table(numbers, "c", "asc")
    first = numbers.displayed()
    art.sort_table(numbers, "c", "asc")
    assert numbers.displayed() == first


def test_sort_is_stable():
    table = make_table([("k", "number"), ("v", "number")],
                       [[1.0, 10.0], [0.0, 20.0], [1.0, 30.0], [0.0, 40.0]])
    art.sort_table(table, "k", "asc")
    rows, _ = table.displayed()
    assert [r[1] for r in rows] == [20.0, 40.0, 10.0, 30.0]


def test_sort_unknown_column(numbers):
    with pytest.raises(CommandError) as exc:
        art.sort_table(numbers, "nope", "asc")
    assert exc.value.code == "UnknownColumn"


def test_wine_sort_desc_matches_max_scan():
    columns, rows = load_dataset("wine")
    table = make_table(columns, rows)
    art.sort_table(table, "alcohol", "desc")
    displayed, _ = table.displayed()
    idx = table.column_index("alcohol")
    assert displayed[0][idx] == max(r[idx] for r in rows)
    art.sort_table(table, "alcohol", "asc")
    displayed, _ = table.displayed()
    assert displayed[0][idx] == min(r[idx] for r in rows)


def test_filter_direct_predicate():
    table = make_table([("c", "number")], [[1.0], [5.0], [100.0]])
    art.filter_rows(table, "c", "<=", 10.0)
    rows, _ = table.displayed()
    assert [r[0] for r in rows] == [1.0, 5.0]


def test_filter_matching_nothing_keeps_base():
    table = make_table([("c", "number")], [[1.0], [2.0]])
    art.filter_rows(table, "c", ">", 99.0)
    assert table.displayed()[0] == ()
    assert len(table.extract.rows) == 2


def test_filter_type_mismatch():
    table = make_table([("name", "text")], [["a"]])
    with pytest.raises(CommandError) as exc:
        art.filter_rows(table, "name", "<", 1.0)
    assert exc.value.code == "TypeMismatch"


def test_stacked_filters_are_set_intersection():
    rnd = random.Random(42)
    for _ in range(20):
        rows = [[rnd.uniform(0, 10), rnd.uniform(0, 10)]
                for _ in range(rnd.randrange(1, 30))]
        cols = [("a", "number"), ("b", "number")]
        fa = ("a", rnd.choice(["<", "<=", ">", ">="]), rnd.uniform(0, 10))
        fb = ("b", rnd.choice(["<", "<=", ">", ">="]), rnd.uniform(0, 10))
        both = make_table(cols, rows)
        art.filter_rows(both, *fa)
        art.filter_rows(both, *fb)
        only_a = make_table(cols, rows)
        art.filter_rows(only_a, *fa)
        only_b = make_table(cols, rows)
        art.filter_rows(only_b, *fb)
        ids = set(both.displayed()[1])
        assert ids == set(only_a.displayed()[1]) & set(only_b.displayed()[1])


def test_remove_filter_individually():
    table = make_table([("c", "number")], [[1.0], [5.0], [100.0]])
    art.filter_rows(table, "c", "<=", 10.0)
    art.filter_rows(table, "c", ">", 2.0)
    art.remove_filter(table, 0)
    rows, _ = table.displayed()
    assert [r[0] for r in rows] == [5.0, 100.0]


def test_select_column_toggles(numbers):
    art.select_column(numbers, "c")
    assert numbers.selected_columns == ["c"]
    art.select_column(numbers, "c")
    assert numbers.selected_columns == []


def two_col_table():
    return make_table([("a", "number"), ("b", "number")],
                      [[1.0, 3.0], [2.0, 4.0]])


def test_merge_pairs_columns():
    table = two_col_table()
    art.select_column(table, "a")
    art.select_column(table, "b")
    vis = art.merge_columns_to_vis(table, "a", "b", Pose(), "v1")
    assert vis.kind == "Scatter2D"
    assert vis.extract.axis_names == ("a", "b")
    assert vis.extract.points == ((1.0, 3.0), (2.0, 4.0))
    assert vis.origin_table == table.id


def test_merge_requires_selection_and_distinct_columns():
    table = two_col_table()
    with pytest.raises(CommandError) as exc:
        art.merge_columns_to_vis(table, "a", "b", Pose(), "v1")
    assert exc.value.code == "ColumnsNotSelected"
    art.select_column(table, "a")
    with pytest.raises(CommandError) as exc:
        art.merge_columns_to_vis(table, "a", "a", Pose(), "v1")
    assert exc.value.code == "SameColumn"


def test_merge_respects_filters():
    table = make_table([("a", "number"), ("b", "number")],
                       [[1.0, 3.0], [2.0, 4.0], [9.0, 5.0]])
    art.select_column(table, "a")
    art.select_column(table, "b")
    art.filter_rows(table, "a", "<=", 2.0)
    vis = art.merge_columns_to_vis(table, "a", "b", Pose(), "v1")
    assert vis.extract.points == ((1.0, 3.0), (2.0, 4.0))


def make_vis():
    table = make_table([("a", "number"), ("b", "number"), ("c", "number")],
                       [[1.0, 3.0, 7.0], [2.0, 4.0, 8.0]])
    for col in ("a", "b"):
        art.select_column(table, col)
    return table, art.merge_columns_to_vis(table, "a", "b", Pose(), "v1")


def test_add_then_remove_axis_roundtrip():
    table, vis = make_vis()
    original = vis.extract
    art.add_axis(vis, table, "c")
    assert vis.kind == "Scatter3D"
    assert vis.extract.points == ((1.0, 3.0, 7.0), (2.0, 4.0, 8.0))
    with pytest.raises(CommandError):  # already 3 axes
        art.add_axis(vis, table, "c")
    art.remove_axis(vis, 2)
    assert vis.extract == original


def test_remove_axis_keeps_order():
    table, vis = make_vis()
    art.add_axis(vis, table, "c")
    art.remove_axis(vis, 0)
    assert vis.extract.axis_names == ("b", "c")
    assert vis.extract.points == ((3.0, 7.0), (4.0, 8.0))


def test_remove_axis_bad_index():
    table, vis = make_vis()
    art.add_axis(vis, table, "c")
    with pytest.raises(CommandError) as exc:
        art.remove_axis(vis, 5)
    assert exc.value.code == "BadIndex"


def test_remove_point_realigns_colors():
    _, vis = make_vis()
    vis.extract = vis.extract.__class__(
        vis.extract.kind, vis.extract.axis_names, vis.extract.points,
        (4, 5), vis.extract.row_ids)
    art.remove_point(vis, 0)
    assert vis.extract.points == ((2.0, 4.0),)
    assert vis.extract.colors == (5,)


def test_remove_all_points_leaves_valid_empty_vis():
    _, vis = make_vis()
    art.remove_point(vis, 0)
    art.remove_point(vis, 0)
    assert vis.extract.points == ()
    with pytest.raises(CommandError):
        art.remove_point(vis, 0)


def test_nodelink_point_removal_drops_incident_edges():
    from icon_engine.kernel import PlotExtract
    extract = PlotExtract(
        "NodeLink3D", ("x", "y", "z"),
        ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (3.0, 0.0, 0.0)),
        (0, 0, 0), (0, 1, 2), ((0, 1), (1, 0), (2, 1)), 1)
    vis = art.VisArtifact(id="v", kind="NodeLink3D", extract=extract,
                          pose=Pose())
    art.remove_point(vis, 1)
    assert vis.extract.points == ((0.0, 0.0, 0.0), (3.0, 0.0, 0.0))
    assert vis.extract.edges == ()  # all edges touched node 1


def test_apply_vis_to_table_removes_rows():
    table, vis = make_vis()
    art.remove_point(vis, 1)
    art.apply_vis_to_table(vis, table)
    rows, ids = table.displayed()
    assert rows == ((1.0, 3.0, 7.0),)
    assert ids == (0,)


def test_apply_vis_identity_when_untouched():
    table, vis = make_vis()
    before = table.displayed()
    art.apply_vis_to_table(vis, table)
    assert table.displayed() == before


def test_apply_vis_origin_mismatch():
    table, vis = make_vis()
    other = make_table([("a", "number")], [[1.0]], table_id="t2")
    with pytest.raises(CommandError) as exc:
        art.apply_vis_to_table(vis, other)
    assert exc.value.code == "OriginMismatch"

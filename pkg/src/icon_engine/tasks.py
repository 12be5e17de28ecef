"""Scripted study tasks and the reference fixture notebook (14 windows, 30 cells)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CommandError, IconError
from .kernels import kmeans, knn_graph
from .metrics import MetricsReport, compute_metrics
from .notebook import Cell, Notebook, Pose, Window, layout_semicircle
from .session import SEPARATED, UNIFIED, Session

# Outlier predicate used by the exploratory script: drop high-color rows.
OUTLIER_COLUMN = "color_intensity"
OUTLIER_COMPARATOR = "<="
OUTLIER_THRESHOLD = 10.0

# Expected cell kinds for the fixture, used by the classification corpus test.
FIXTURE_LABELS = {
    "c01": "Code", "c02": "Data", "c03": "Data", "c04": "Code",
    "c05": "Data", "c06": "Empty", "c07": "Code", "c08": "Code",
    "c09": "Code", "c10": "Visualization", "c11": "Visualization",
    "c12": "Empty", "c13": "Data", "c14": "Code", "c15": "Visualization",
    "c16": "Empty", "c17": "Data", "c18": "Visualization", "c19": "Code",
    "c20": "Visualization", "c21": "Visualization", "c22": "Code",
    "c23": "Data", "c24": "Empty", "c25": "Code", "c26": "Empty",
    "c27": "Data", "c28": "Code", "c29": "Empty", "c30": "Empty",
}


def build_study_notebook() -> Notebook:
    """The pre-existing study code: wine + iris, K-Means and KNN graphs."""
    windows = [
        ("w01", [("c01", "# Wine analysis"),
                 ("c02", 'df = load_dataset("wine")')]),
        ("w02", [("c03", 'di = load_dataset("iris")'),
                 ("c04", "# iris overview")]),
        ("w03", [("c05", 'df_small = df[["alcohol", "malic_acid", '
                         '"color_intensity"]]'),
                 ("c06", "")]),
        ("w04", [("c07", "k_means = 3  # range: 2..6"),
                 ("c08", "k_nn = 1  # range: 1..4")]),
        ("w05", [("c09", "labels = kmeans(df_small, k=k_means)"),
                 ("c10", 'plt.scatter(df_small["alcohol"], '
                         'df_small["malic_acid"], c=labels)')]),
        ("w06", [("c11", "knn_graph(df_small, k=k_nn)"),
                 ("c12", "")]),
        ("w07", [("c13", 'df2 = df[df["alcohol"] <= 14.0]'),
                 ("c14", "# filtered wine")]),
        ("w08", [("c15", 'plt.scatter(df["alcohol"], df["color_intensity"])'),
                 ("c16", "")]),
        ("w09", [("c17", 'di2 = di[["sepal_length", "sepal_width", '
                         '"petal_length"]]'),
                 ("c18", 'plt.scatter(di["sepal_length"], di["petal_width"])')]),
        ("w10", [("c19", "labels2 = kmeans(di2, k=3)"),
                 ("c20", 'plt.scatter(di2["sepal_length"], '
                         'di2["sepal_width"], di2["petal_length"], c=labels2)')]),
        ("w11", [("c21", "knn_graph(di2, k=2)"),
                 ("c22", "# notes")]),
        ("w12", [("c23", "dcopy = df"),
                 ("c24", "")]),
        ("w13", [("c25", "# scratch"),
                 ("c26", "")]),
        ("w14", [("c27", 'df3 = df[df["proline"] >= 600.0]'),
                 ("c28", "# end"),
                 ("c29", ""),
                 ("c30", "")]),
    ]
    nb = Notebook(
        id="study-fixture",
        windows=[Window(id=wid, cells=[Cell(id=cid, source=src)
                                       for cid, src in cells])
                 for wid, cells in windows])
    layout_semicircle(nb, radius=2.0, center=Pose())
    return nb


@dataclass
class TaskRun:
    session: Session
    report: MetricsReport
    ground_truth: dict
    details: dict = field(default_factory=dict)


class _Script:
    """Helper that advances a millisecond clock per dispatched command."""

    def __init__(self, session: Session, step_ms: int = 2000):
        self.session = session
        self.t = 0
        self.step_ms = step_ms

    def do(self, **command):
        self.t += self.step_ms
        command["t"] = self.t
        try:
            return self.session.dispatch(command)
        except IconError as exc:
            raise CommandError(
                "ScriptStepFailed",
                f"{command.get('op')} at t={self.t}: {exc}") from exc


def _pose_near(window_pose: Pose, dx: float = 0.0) -> dict:
    return Pose(x=max(-2.5, min(2.5, window_pose.x + dx)), y=window_pose.y,
                z=window_pose.z, yaw=window_pose.yaw).to_dict()


def _focus_window(s: _Script, cell_id: str):
    window = s.session.notebook.window_of(cell_id)
    s.do(op="set_focus", region={"kind": "window", "id": window.id},
         dwell_ms=800)


def _fetch_artifact(s: _Script, cell_id: str, mode: str) -> str:
    """Pull (Unified) or enter (Separated) a cell; returns the artifact id."""
    if mode == UNIFIED:
        _focus_window(s, cell_id)
        pose = _pose_near(s.session.notebook.window_of(cell_id).pose, dx=0.2)
        events = s.do(op="pull_out", cell_id=cell_id, pose=pose)
    else:
        events = s.do(op="enter_cell", cell_id=cell_id)
    return events[-1]["artifact_id"]


def _bring_home(s: _Script, artifact_id: str, mode: str):
    """In Separated, carry the artifact through the portal to the notebook."""
    if mode == SEPARATED:
        s.do(op="grab", hand="R", item={"artifact": artifact_id})
        s.do(op="exit_portal")
        s.do(op="release", hand="R")


def run_instructed(mode: str = UNIFIED, dwell_ms: int | None = None) -> TaskRun:
    session = Session(build_study_notebook(), mode=mode, dwell_ms=dwell_ms)
    s = _Script(session)
    details = {}

    # 1. generate the wine data table and report its shape
    table_id = _fetch_artifact(s, "c02", mode)
    table = session.artifacts[table_id]
    shape = list(table.displayed_extract().shape)
    s.do(op="answer", step="wine_shape", value=shape)

    # 2. sort to find the lowest and highest alcohol values
    s.do(op="sort_table", artifact_id=table_id, column="alcohol",
         direction="asc")
    low = table.displayed()[0][0][table.column_index("alcohol")]
    s.do(op="answer", step="alcohol_min", value=low)
    s.do(op="sort_table", artifact_id=table_id, column="alcohol",
         direction="desc")
    high = table.displayed()[0][0][table.column_index("alcohol")]
    s.do(op="answer", step="alcohol_max", value=high)

    # 3. document the findings in the notebook
    if mode == SEPARATED:
        s.do(op="exit_portal")
    _focus_window(s, "c06")
    s.do(op="edit", cell_id="c06",
         source=f"# alcohol min {low!r} max {high!r}")

    # 4. convert the 2D wine scatter into a 3D scatter
    vis_id = _fetch_artifact(s, "c15", mode)
    s.do(op="add_axis", vis_id=vis_id, table_id=table_id, column="hue")
    details["vis_extract"] = session.artifacts[vis_id].extract

    # 5. sync the 3D scatter back into its notebook cell
    _bring_home(s, vis_id, mode)
    s.do(op="put_in", artifact_id=vis_id, cell_id="c15")
    s.do(op="task_complete")

    ground_truth = {"wine_shape": [178, 13],
                    "alcohol_min": low, "alcohol_max": high}
    report = compute_metrics(session.events, ground_truth)
    return TaskRun(session, report, ground_truth, details)


def _sweep_objective(points, edges, labels) -> float:
    """Fraction of KNN edges whose endpoints share a K-Means cluster."""
    if not edges:
        return 0.0
    same = sum(1 for i, j in edges if labels[i] == labels[j])
    return same / len(edges)


def run_exploratory(mode: str = UNIFIED, dwell_ms: int | None = None) -> TaskRun:
    session = Session(build_study_notebook(), mode=mode, dwell_ms=dwell_ms)
    s = _Script(session)
    details = {}

    # 1. pull the small wine table and filter out the outlier rows
    _focus_window(s, "c02")
    s.do(op="execute", cell_id="c02")  # the selection cell needs df bound
    table_id = _fetch_artifact(s, "c05", mode)
    s.do(op="filter_rows", artifact_id=table_id, column=OUTLIER_COLUMN,
         comparator=OUTLIER_COMPARATOR, threshold=OUTLIER_THRESHOLD)
    details["filtered_extract"] = \
        session.artifacts[table_id].displayed_extract()

    # 2. sync the cleaned table back into its origin cell
    _bring_home(s, table_id, mode)
    _focus_window(s, "c05")
    s.do(op="put_in", artifact_id=table_id, cell_id="c05")

    # 3. sweep the declared parameter ranges, scoring each pair by how well
    #    the KNN graph structure agrees with the K-Means clustering
    ranges = {"k_means": (2, 6), "k_nn": (1, 4)}
    best = None
    for km in range(ranges["k_means"][0], ranges["k_means"][1] + 1):
        for kn in range(ranges["k_nn"][0], ranges["k_nn"][1] + 1):
            _focus_window(s, "c07")
            s.do(op="edit", cell_id="c07",
                 source=f"k_means = {km}  # range: 2..6")
            s.do(op="edit", cell_id="c08",
                 source=f"k_nn = {kn}  # range: 1..4")
            for cell_id in ("c07", "c08", "c05", "c09", "c10", "c11"):
                s.do(op="execute", cell_id=cell_id)
            if mode == SEPARATED:
                # inspect the node-link diagram in the artifact space
                vis_id = _fetch_artifact(s, "c11", mode)
                s.do(op="exit_portal")
            labels = session.extract_plot("c10").colors
            graph = session.extract_plot("c11")
            score = _sweep_objective(graph.points, graph.edges, labels)
            key = (score, -km, -kn)
            if best is None or key > best[0]:
                best = (key, (km, kn))
    best_km, best_kn = best[1]

    # 4. record the chosen parameter pair in the notebook
    _focus_window(s, "c07")
    s.do(op="edit", cell_id="c07", source=f"k_means = {best_km}  # range: 2..6")
    s.do(op="edit", cell_id="c08", source=f"k_nn = {best_kn}  # range: 1..4")
    for cell_id in ("c07", "c08", "c05", "c09", "c10", "c11"):
        s.do(op="execute", cell_id=cell_id)
    s.do(op="answer", step="best_params", value=[best_km, best_kn])
    s.do(op="task_complete")

    ground_truth = {"best_params": [best_km, best_kn]}
    report = compute_metrics(session.events, ground_truth)
    details["best_params"] = (best_km, best_kn)
    return TaskRun(session, report, ground_truth, details)


def run_task(script: str, mode: str = UNIFIED,
             dwell_ms: int | None = None) -> TaskRun:
    if script == "instructed":
        return run_instructed(mode, dwell_ms)
    if script == "exploratory":
        return run_exploratory(mode, dwell_ms)
    raise CommandError("UnknownScript", f"script {script!r}")


def sweep_oracle(points, km_range=(2, 6), kn_range=(1, 4)):
    """Exhaustive parameter sweep over the fixture's declared ranges,
    computed directly on the data (independent of the session machinery)."""
    best = None
    for km in range(km_range[0], km_range[1] + 1):
        labels = kmeans(points, km)
        for kn in range(kn_range[0], kn_range[1] + 1):
            edges = knn_graph(points, kn)
            score = _sweep_objective(points, edges, labels)
            key = (score, -km, -kn)
            if best is None or key > best[0]:
                best = (key, (km, kn))
    return best[1]

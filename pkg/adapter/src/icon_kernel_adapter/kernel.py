"""Real-stack cell execution: pandas DataFrames, matplotlib figures.

Cells are run as ordinary Python in a namespace that binds the notebook
builtins (load_dataset, table, kmeans, knn_graph, plt). Scatter calls go
through a real matplotlib Agg figure and the displayed coordinates are
read back from the rendered collection, so the extraction path exercises
the actual plotting stack rather than echoing its inputs.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
import pandas as pd
from matplotlib.figure import Figure

KMEANS_ITERS = 50
_PARAM_RE = re.compile(
    r"^\s*(?P<name>[A-Za-z_]\w*)\s*=\s*(?P<value>-?\d+)\s*"
    r"#\s*range:\s*(?P<low>-?\d+)\s*\.\.\s*(?P<high>-?\d+)\s*$")


class AdapterError(Exception):
    pass


@dataclass
class Display:
    kind: str  # Scatter2D | Scatter3D | NodeLink3D
    axis_names: list
    points: list
    colors: list
    edges: list = field(default_factory=list)
    knn_k: int = 0

    def payload(self) -> dict:
        return {"kind": self.kind, "axis_names": list(self.axis_names),
                "points": [list(p) for p in self.points],
                "colors": [int(c) for c in self.colors],
                "edges": [list(e) for e in self.edges],
                "knn_k": self.knn_k}


@lru_cache(maxsize=None)
def _load_csv(name: str) -> pd.DataFrame:
    path = resources.files(__package__) / "data" / f"{name}.csv"
    with resources.as_file(path) as p:
        return pd.read_csv(p)


def load_dataset(name: str) -> pd.DataFrame:
    if name not in ("wine", "iris"):
        raise AdapterError(f"unknown dataset {name!r}")
    return _load_csv(name).copy()


def table(columns, rows) -> pd.DataFrame:
    names, dtypes = [], []
    for spec in columns:
        name, _, dtype = spec.partition(":")
        names.append(name)
        dtypes.append(dtype or "number")
    frame = pd.DataFrame(rows, columns=names)
    for name, dtype in zip(names, dtypes):
        if dtype == "number":
            frame[name] = pd.to_numeric(frame[name]) if len(frame) else \
                frame[name].astype(float)
        else:
            frame[name] = frame[name].astype(object)
    return frame


def _numeric_matrix(frame: pd.DataFrame, limit=None) -> np.ndarray:
    numeric = [c for c in frame.columns
               if pd.api.types.is_numeric_dtype(frame[c])]
    if limit is not None:
        numeric = numeric[:limit]
    return frame[numeric].to_numpy(dtype=np.float64), numeric


def kmeans(frame: pd.DataFrame, k: int, iters: int = KMEANS_ITERS):
    points, _ = _numeric_matrix(frame)
    n = len(points)
    if not 1 <= k <= n:
        raise AdapterError(f"KTooLarge: k={k} with {n} points")
    # farthest-first init: point 0, then maximal min-distance, ties low index
    chosen = [0]
    min_d = ((points - points[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        best = int(np.argmax(min_d))
        chosen.append(best)
        min_d = np.minimum(min_d, ((points - points[best]) ** 2).sum(axis=1))
    centroids = points[chosen].copy()
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(iters):
        diff = points[:, None, :] - centroids[None, :, :]
        dists = (diff * diff).sum(axis=2)
        new_labels = np.argmin(dists, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    return [int(v) for v in labels]


def _knn_edges(points: np.ndarray, k: int):
    n = len(points)
    if not 0 <= k < n:
        raise AdapterError(f"KTooLarge: k={k} with {n} points")
    if k == 0:
        return []
    diff = points[:, None, :] - points[None, :, :]
    dists = (diff * diff).sum(axis=2)
    np.fill_diagonal(dists, np.inf)
    order = np.argsort(dists, axis=1, kind="stable")
    return [(i, int(j)) for i in range(n) for j in order[i, :k]]


class _Plt:
    """Minimal pyplot facade that renders into an offscreen Agg figure."""

    def __init__(self):
        self.last: Display | None = None

    def scatter(self, x, y, z=None, c=None):
        names = [getattr(s, "name", None) or f"ax{i}"
                 for i, s in enumerate((x, y) if z is None else (x, y, z))]
        fig = Figure()
        if z is None:
            axes = fig.add_subplot()
            coll = axes.scatter(np.asarray(x, dtype=float),
                                np.asarray(y, dtype=float))
            points = [tuple(float(v) for v in row)
                      for row in coll.get_offsets()]
            kind = "Scatter2D"
        else:
            axes = fig.add_subplot(projection="3d")
            coll = axes.scatter(np.asarray(x, dtype=float),
                                np.asarray(y, dtype=float),
                                np.asarray(z, dtype=float))
            xs, ys, zs = coll._offsets3d
            points = [(float(a), float(b), float(d))
                      for a, b, d in zip(xs, ys, zs)]
            kind = "Scatter3D"
        n = len(points)
        colors = [0] * n if c is None else [int(v) for v in c]
        if len(colors) != n:
            raise AdapterError(
                f"color vector length {len(colors)} != point count {n}")
        self.last = Display(kind, names, points, colors)
        return coll


class AdapterKernel:
    """Shared environment across cells; failed cells commit nothing."""

    def __init__(self):
        self.env: dict = {}
        self.last_display: Display | None = None

    def reset(self):
        self.env = {}
        self.last_display = None

    def _check_param_ranges(self, source: str):
        for line in source.splitlines():
            match = _PARAM_RE.match(line)
            if match is None:
                continue
            value, low, high = (int(match.group(g))
                                for g in ("value", "low", "high"))
            if not low <= value <= high:
                raise AdapterError(f"{match.group('name')}={value} outside "
                                   f"range {low}..{high}")

    def execute_source(self, source: str):
        """Returns (defined_vars, display) or raises AdapterError."""
        plt = _Plt()
        scratch = dict(self.env)
        display_box = []

        def knn_graph(frame, k):
            points, names = _numeric_matrix(frame, limit=3)
            if points.shape[1] < 3:
                raise AdapterError(
                    "node-link display needs at least 3 numeric columns")
            edges = _knn_edges(points, int(k))
            shown = Display("NodeLink3D", names,
                            [tuple(float(v) for v in p) for p in points],
                            [0] * len(points), edges, int(k))
            display_box.append(shown)
            return shown

        scratch.update(load_dataset=load_dataset, table=table, kmeans=kmeans,
                       knn_graph=knn_graph, plt=plt)
        self._check_param_ranges(source)
        try:
            tree = ast.parse(source)
        except SyntaxError as exc:
            raise AdapterError(f"syntax error: {exc.msg}") from exc
        try:
            exec(compile(tree, "<cell>", "exec"), {"__builtins__": {}},
                 scratch)
        except NameError as exc:
            name = re.search(r"'(\w+)'", str(exc))
            raise AdapterError(
                f"undefined variable '{name.group(1)}'" if name
                else str(exc)) from exc
        except AdapterError:
            raise
        except Exception as exc:
            raise AdapterError(f"{type(exc).__name__}: {exc}") from exc

        for builtin in ("load_dataset", "table", "kmeans", "knn_graph", "plt"):
            scratch.pop(builtin, None)
        defined = []
        for node in tree.body:
            targets = node.targets if isinstance(node, ast.Assign) else []
            for target in targets:
                if isinstance(target, ast.Name) and target.id not in defined:
                    defined.append(target.id)
        display = plt.last or (display_box[-1] if display_box else None)
        self.env = scratch
        if display is not None:
            self.last_display = display
        return defined, display

    def extract_table(self, var: str):
        """(columns, rows) for a DataFrame variable."""
        if var not in self.env:
            raise AdapterError(f"undefined variable '{var}'")
        frame = self.env[var]
        if not isinstance(frame, pd.DataFrame):
            raise AdapterError(f"NotTabular: '{var}' is not a table")
        columns = [{"name": str(c),
                    "dtype": ("number"
                              if pd.api.types.is_numeric_dtype(frame[c])
                              else "text")}
                   for c in frame.columns]
        rows = [[(float(v) if isinstance(v, (int, float, np.floating,
                                             np.integer)) else v)
                 for v in row] for row in frame.itertuples(index=False)]
        return columns, rows

"""Workspace state machine: one session = one notebook + one workspace.

All mutation goes through `dispatch`, which applies a command atomically and
returns the provenance events it produced (also appended to the session log).
Commands and events are plain dicts so the log serializes as JSON-lines and
replays bit-exact.
"""

from __future__ import annotations

import math
import os

from . import artifacts as art
from . import grammar as g
from .codegen import generate_create, generate_update
from .errors import CommandError
from .kernel import MockKernel, PlotExtract, TableExtract, TableValue
from .notebook import Notebook, Pose, edit_cell

UNIFIED = "unified"
SEPARATED = "separated"
NOTEBOOK_SPACE = "notebook"
ARTIFACT_SPACE = "artifact"

DEFAULT_DWELL_MS = 500
SPAWN_DISTANCE_M = 1.0
SNAP_RADIUS_M = 0.3

HANDS = ("L", "R")


def default_dwell_ms() -> int:
    raw = os.environ.get("ICON_DWELL_MS")
    if raw is None:
        return DEFAULT_DWELL_MS
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_DWELL_MS


class Session:
    def __init__(self, notebook: Notebook, mode: str = UNIFIED,
                 dwell_ms: int | None = None):
        if mode not in (UNIFIED, SEPARATED):
            raise CommandError("BadMode", f"mode {mode!r}")
        self.notebook = notebook
        self.mode = mode
        self.active_space = NOTEBOOK_SPACE if mode == SEPARATED else None
        self.kernel = MockKernel()
        self.artifacts: dict = {}
        self.links: list = []
        self.held: dict = {hand: None for hand in HANDS}
        self.focus = None
        self.user_pose = Pose()
        self.dwell_ms = default_dwell_ms() if dwell_ms is None else dwell_ms
        self.events: list = []
        self.displays: dict = {}  # cell_id -> PlotExtract from last execute
        self.artifact_seq = 0
        self.last_t = 0

    # ------------------------------------------------------------------
    # dispatch

    _OPS = {}

    def dispatch(self, command: dict) -> list:
        op = command.get("op")
        handler = self._OPS.get(op)
        if handler is None:
            raise CommandError("UnknownCommand", f"op {op!r}")
        t = command.get("t", self.last_t)
        if not isinstance(t, int) or t < self.last_t:
            raise CommandError("BadTimestamp",
                               f"t={t!r} before last t={self.last_t}")
        events = handler(self, command)
        for ev in events:
            ev["t"] = t
        if events:  # eventless commands mutate nothing, including the clock
            self.last_t = t
            self.events.extend(events)
        return events

    # ------------------------------------------------------------------
    # lookup / visibility helpers

    def _artifact(self, artifact_id: str):
        if artifact_id not in self.artifacts:
            raise CommandError("UnknownArtifact", f"no artifact {artifact_id!r}")
        return self.artifacts[artifact_id]

    def _table_artifact(self, artifact_id: str) -> art.TableArtifact:
        a = self._artifact(artifact_id)
        if not isinstance(a, art.TableArtifact):
            raise CommandError("NotATable", f"{artifact_id!r} is not a table")
        self._require_visible_artifact(a)
        return a

    def _vis_artifact(self, artifact_id: str) -> art.VisArtifact:
        a = self._artifact(artifact_id)
        if not isinstance(a, art.VisArtifact):
            raise CommandError("NotAVis",
                               f"{artifact_id!r} is not a visualization")
        self._require_visible_artifact(a)
        return a

    def _require_visible_artifact(self, artifact):
        if self.mode == SEPARATED and artifact.space != self.active_space:
            raise CommandError("RegionNotVisible",
                               f"artifact {artifact.id!r} is in the hidden space")

    def _require_notebook_visible(self):
        if self.mode == SEPARATED and self.active_space != NOTEBOOK_SPACE:
            raise CommandError("RegionNotVisible",
                               "the notebook is in the hidden space")

    def _next_artifact_id(self) -> str:
        self.artifact_seq += 1
        return f"a{self.artifact_seq}"

    def _link_for(self, artifact_id: str):
        for link in self.links:
            if link.artifact_id == artifact_id:
                return link
        return None

    def _drop_item(self, artifact_id: str):
        """Remove an artifact from hands and links (on consume/delete)."""
        link = self._link_for(artifact_id)
        if link is not None:
            self.links.remove(link)
        for hand in HANDS:
            item = self.held[hand]
            if item and item.get("artifact") == artifact_id:
                self.held[hand] = None

    @staticmethod
    def _pose_from(payload) -> Pose:
        if isinstance(payload, Pose):
            return payload.validate()
        if not isinstance(payload, dict):
            raise CommandError("PoseInvalid", "pose must be an object")
        try:
            return Pose.from_dict(payload).validate()
        except (KeyError, TypeError, ValueError) as exc:
            raise CommandError("PoseInvalid", str(exc)) from exc

    # ------------------------------------------------------------------
    # kernel plumbing

    def _run_cell(self, cell) -> dict:
        """Execute a cell; returns the Execute event. Env commits on success."""
        result = self.kernel.execute_source(cell.id, cell.source)
        if result.status == "Ok":
            cell.dirty = False
            if result.display is not None:
                self.displays[cell.id] = result.display
        event = {"kind": "Execute", "cell_id": cell.id,
                 "status": result.status, "defined": list(result.defined_vars)}
        if result.status == "Error":
            event["message"] = result.message
        return event

    def _cell_table_extract(self, cell) -> tuple:
        """(var, TableExtract) for the last table variable a data cell binds."""
        defined = g.defined_variables(g.parse_source(cell.source))
        for var in reversed(defined):
            value = self.kernel.env.get(var)
            if isinstance(value, TableValue):
                return var, TableExtract(value.columns, value.rows,
                                         value.row_ids)
        raise CommandError("NotTabular",
                           f"cell {cell.id!r} does not bind a table")

    def extract_plot(self, cell_id: str) -> PlotExtract:
        cell = self.notebook.cell(cell_id)
        if cell.kind != g.CellKind.VISUALIZATION:
            raise CommandError("NotVisualizationCell",
                               f"cell {cell_id!r} is {cell.kind.value}")
        if cell_id not in self.displays:
            raise CommandError("NotExecuted",
                               f"cell {cell_id!r} has not been executed")
        return self.displays[cell_id]

    def _materialize(self, cell, pose: Pose):
        """Build the artifact for a pulled/entered cell. Cell must be executed."""
        if cell.kind == g.CellKind.DATA:
            var, extract = self._cell_table_extract(cell)
            artifact = art.TableArtifact(
                id=self._next_artifact_id(), extract=extract, pose=pose,
                origin_cell=cell.id, origin_var=var)
        else:
            display = self.displays.get(cell.id)
            if display is None:
                raise CommandError("NotExecuted",
                                   f"cell {cell.id!r} produced no display")
            artifact = art.VisArtifact(
                id=self._next_artifact_id(), kind=display.kind,
                extract=display, pose=pose, origin_cell=cell.id)
        artifact.space = (ARTIFACT_SPACE if self.mode == SEPARATED
                          else NOTEBOOK_SPACE)
        self.artifacts[artifact.id] = artifact
        self.links.append(art.Link(cell.id, artifact.id))
        return artifact

    def _pull_common(self, cell, pose: Pose):
        """Auto-execute + materialize with rollback so the op stays atomic."""
        if cell.kind not in (g.CellKind.DATA, g.CellKind.VISUALIZATION):
            raise CommandError("WrongCellKind",
                               f"cell {cell.id!r} is {cell.kind.value}")
        env_backup = self.kernel.env
        dirty_backup = cell.dirty
        display_backup = self.displays.get(cell.id)
        seq_backup = self.artifact_seq
        events = []
        try:
            if cell.dirty or (cell.kind == g.CellKind.VISUALIZATION
                              and cell.id not in self.displays):
                exec_event = self._run_cell(cell)
                if exec_event["status"] == "Error":
                    raise CommandError("KernelError", exec_event["message"])
                events.append(exec_event)
            artifact = self._materialize(cell, pose)
        except CommandError:
            self.kernel.env = env_backup
            cell.dirty = dirty_backup
            if display_backup is None:
                self.displays.pop(cell.id, None)
            else:
                self.displays[cell.id] = display_backup
            self.artifact_seq = seq_backup
            raise
        return artifact, events

    # ------------------------------------------------------------------
    # command handlers

    def _cmd_edit(self, cmd):
        self._require_notebook_visible()
        cell = self.notebook.cell(cmd["cell_id"])
        source = cmd.get("source", "")
        if not isinstance(source, str):
            raise CommandError("BadSource", "source must be a string")
        edit_cell(self.notebook, cell.id, source)
        self.displays.pop(cell.id, None)
        return [{"kind": "Edit", "cell_id": cell.id, "source": source}]

    def _cmd_execute(self, cmd):
        self._require_notebook_visible()
        cell = self.notebook.cell(cmd["cell_id"])
        return [self._run_cell(cell)]

    def _cmd_pull_out(self, cmd):
        if self.mode != UNIFIED:
            raise CommandError("WrongMode", "pull_out requires Unified mode")
        cell = self.notebook.cell(cmd["cell_id"])
        pose = self._pose_from(cmd["pose"])
        artifact, events = self._pull_common(cell, pose)
        events.append({"kind": "PullOut", "cell_id": cell.id,
                       "artifact_id": artifact.id, "pose": pose.to_dict()})
        return events

    def _cmd_put_in(self, cmd):
        artifact = self._artifact(cmd["artifact_id"])
        if self.mode == SEPARATED:
            if self.active_space != NOTEBOOK_SPACE:
                raise CommandError("RegionNotVisible",
                                   "the notebook is in the hidden space")
            if artifact.space != NOTEBOOK_SPACE:
                raise CommandError(
                    "RegionNotVisible",
                    "artifact must be carried through the portal first")
        cell = self.notebook.cell(cmd["cell_id"])
        if cell.kind == g.CellKind.EMPTY:
            result = generate_create(artifact, self.notebook, cell.id)
        elif artifact.origin_cell == cell.id:
            result = generate_update(artifact, self.notebook, cell.id)
        else:
            raise CommandError("InvalidTarget",
                               f"cell {cell.id!r} is occupied and not the origin")
        edit_cell(self.notebook, cell.id, result.new_source)
        self.displays.pop(cell.id, None)
        del self.artifacts[artifact.id]
        self._drop_item(artifact.id)
        kind = "PutInCreate" if result.mode == "Create" else "PutInUpdate"
        return [{"kind": kind, "artifact_id": artifact.id, "cell_id": cell.id,
                 "variable": result.variable}]

    def _cmd_grab(self, cmd):
        hand = cmd.get("hand")
        if hand not in HANDS:
            raise CommandError("BadHand", f"hand {hand!r}")
        if self.held[hand] is not None:
            raise CommandError("HandOccupied", f"hand {hand} is full")
        item = cmd.get("item")
        if not isinstance(item, dict):
            raise CommandError("BadItem", "item must be an object")
        if "artifact" in item:
            artifact = self._artifact(item["artifact"])
            self._require_visible_artifact(artifact)
            norm = {"artifact": artifact.id}
        elif "column" in item:
            table_id, column = item["column"]
            table = self._table_artifact(table_id)
            table.column_index(column)
            norm = {"column": [table_id, column]}
        else:
            raise CommandError("BadItem", "item must be an artifact or column")
        other = self.held["L" if hand == "R" else "R"]
        if other == norm:
            raise CommandError("AlreadyHeld", "item is in the other hand")
        self.held[hand] = norm
        return [{"kind": "Grab", "hand": hand, "item": norm}]

    def _cmd_release(self, cmd):
        hand = cmd.get("hand")
        if hand not in HANDS:
            raise CommandError("BadHand", f"hand {hand!r}")
        if self.held[hand] is None:
            raise CommandError("HandEmpty", f"hand {hand} is empty")
        item = self.held[hand]
        self.held[hand] = None
        return [{"kind": "Release", "hand": hand, "item": item}]

    def _held_count(self) -> int:
        return sum(1 for item in self.held.values() if item is not None)

    def _cmd_enter_cell(self, cmd):
        if self.mode != SEPARATED:
            raise CommandError("WrongMode", "enter requires Separated mode")
        if self.active_space != NOTEBOOK_SPACE:
            raise CommandError("WrongSpace", "already in the artifact space")
        cell = self.notebook.cell(cmd["cell_id"])
        yaw = self.user_pose.yaw
        half = 2.5  # clamp the spawn point into the arena
        spawn = Pose(
            x=max(-half, min(half,
                             self.user_pose.x + SPAWN_DISTANCE_M * math.sin(yaw))),
            y=self.user_pose.y,
            z=max(-half, min(half,
                             self.user_pose.z + SPAWN_DISTANCE_M * math.cos(yaw))),
            yaw=yaw + math.pi)
        artifact, events = self._pull_common(cell, spawn)
        self.active_space = ARTIFACT_SPACE
        events.append({"kind": "PortalCross", "direction": "enter",
                       "cell_id": cell.id, "artifact_id": artifact.id,
                       "held": self._held_count()})
        return events

    def _cmd_exit_portal(self, cmd):
        if self.mode != SEPARATED:
            raise CommandError("WrongMode", "exit requires Separated mode")
        if self.active_space != ARTIFACT_SPACE:
            raise CommandError("WrongSpace", "not in the artifact space")
        carried = []
        for hand in HANDS:
            item = self.held[hand]
            if item is None:
                continue
            if "artifact" in item:
                self.artifacts[item["artifact"]].space = NOTEBOOK_SPACE
                carried.append(item["artifact"])
            else:
                # a bare column cannot cross the portal; the hand opens
                self.held[hand] = None
        self.active_space = NOTEBOOK_SPACE
        return [{"kind": "PortalCross", "direction": "exit",
                 "held": len(carried), "carried": carried}]

    def _region_visible(self, region: dict) -> bool:
        kind = region.get("kind")
        if kind == "desk":
            return True
        if kind == "window":
            if not any(w.id == region.get("id") for w in self.notebook.windows):
                raise CommandError("UnknownRegion",
                                   f"no window {region.get('id')!r}")
            return self.mode == UNIFIED or self.active_space == NOTEBOOK_SPACE
        if kind == "artifact":
            artifact = self._artifact(region.get("id"))
            return (self.mode == UNIFIED
                    or artifact.space == self.active_space)
        if kind == "portal":
            return self.mode == SEPARATED and self.active_space == ARTIFACT_SPACE
        raise CommandError("UnknownRegion", f"region kind {kind!r}")

    def _cmd_set_focus(self, cmd):
        region = cmd.get("region")
        if not isinstance(region, dict):
            raise CommandError("UnknownRegion", "region must be an object")
        if not self._region_visible(region):
            raise CommandError("RegionNotVisible",
                               "region is in the hidden space")
        dwell = cmd.get("dwell_ms", 0)
        if region == self.focus or dwell < self.dwell_ms:
            return []
        self.focus = dict(region)
        return [{"kind": "FocusChange", "region": dict(region),
                 "dwell_ms": dwell}]

    def _cmd_move(self, cmd):
        pose = self._pose_from(cmd["pose"])
        self.user_pose = pose
        return [{"kind": "Move", "pose": pose.to_dict()}]

    def _cmd_sort_table(self, cmd):
        table = self._table_artifact(cmd["artifact_id"])
        art.sort_table(table, cmd["column"], cmd["direction"])
        return [{"kind": "SortTable", "artifact_id": table.id,
                 "column": cmd["column"], "direction": cmd["direction"]}]

    def _cmd_filter_rows(self, cmd):
        table = self._table_artifact(cmd["artifact_id"])
        art.filter_rows(table, cmd["column"], cmd["comparator"],
                        cmd["threshold"])
        return [{"kind": "FilterRows", "artifact_id": table.id,
                 "column": cmd["column"], "comparator": cmd["comparator"],
                 "threshold": float(cmd["threshold"])}]

    def _cmd_select_column(self, cmd):
        table = self._table_artifact(cmd["artifact_id"])
        art.select_column(table, cmd["column"])
        return [{"kind": "SelectColumn", "artifact_id": table.id,
                 "column": cmd["column"],
                 "selected": list(table.selected_columns)}]

    def _cmd_merge_columns(self, cmd):
        table = self._table_artifact(cmd["table_id"])
        pose = self._pose_from(cmd["pose"])
        seq_backup = self.artifact_seq
        try:
            vis = art.merge_columns_to_vis(table, cmd["col_a"], cmd["col_b"],
                                           pose, self._next_artifact_id())
        except CommandError:
            self.artifact_seq = seq_backup
            raise
        self.artifacts[vis.id] = vis
        self.links.append(art.Link(table.id, vis.id))
        return [{"kind": "MergeVis", "table_id": table.id, "vis_id": vis.id,
                 "col_a": cmd["col_a"], "col_b": cmd["col_b"],
                 "pose": pose.to_dict()}]

    def _cmd_add_axis(self, cmd):
        vis = self._vis_artifact(cmd["vis_id"])
        table = self._table_artifact(cmd["table_id"])
        art.add_axis(vis, table, cmd["column"])
        return [{"kind": "AddAxis", "vis_id": vis.id, "table_id": table.id,
                 "column": cmd["column"]}]

    def _cmd_remove_axis(self, cmd):
        vis = self._vis_artifact(cmd["vis_id"])
        art.remove_axis(vis, cmd["axis_index"])
        return [{"kind": "RemoveAxis", "vis_id": vis.id,
                 "axis_index": cmd["axis_index"]}]

    def _cmd_remove_point(self, cmd):
        vis = self._vis_artifact(cmd["vis_id"])
        art.remove_point(vis, cmd["point_index"])
        return [{"kind": "RemovePoint", "vis_id": vis.id,
                 "point_index": cmd["point_index"]}]

    def _cmd_apply_vis(self, cmd):
        vis = self._vis_artifact(cmd["vis_id"])
        table = self._table_artifact(cmd["table_id"])
        art.apply_vis_to_table(vis, table)
        vis.origin_table = None  # consumed: the vis is no longer tethered
        link = self._link_for(vis.id)
        if link is not None:
            self.links.remove(link)
        return [{"kind": "ApplyVisToTable", "vis_id": vis.id,
                 "table_id": table.id}]

    def _cmd_delete_artifact(self, cmd):
        artifact = self._artifact(cmd["artifact_id"])
        self._require_visible_artifact(artifact)
        del self.artifacts[artifact.id]
        self._drop_item(artifact.id)
        return [{"kind": "Delete", "artifact_id": artifact.id}]

    def _cmd_answer(self, cmd):
        return [{"kind": "AnswerReported", "step": cmd.get("step"),
                 "value": cmd.get("value")}]

    def _cmd_task_complete(self, cmd):
        return [{"kind": "TaskComplete"}]

    _OPS = {
        "edit": _cmd_edit,
        "execute": _cmd_execute,
        "pull_out": _cmd_pull_out,
        "put_in": _cmd_put_in,
        "grab": _cmd_grab,
        "release": _cmd_release,
        "enter_cell": _cmd_enter_cell,
        "exit_portal": _cmd_exit_portal,
        "set_focus": _cmd_set_focus,
        "move": _cmd_move,
        "sort_table": _cmd_sort_table,
        "filter_rows": _cmd_filter_rows,
        "select_column": _cmd_select_column,
        "merge_columns": _cmd_merge_columns,
        "add_axis": _cmd_add_axis,
        "remove_axis": _cmd_remove_axis,
        "remove_point": _cmd_remove_point,
        "apply_vis": _cmd_apply_vis,
        "delete_artifact": _cmd_delete_artifact,
        "answer": _cmd_answer,
        "task_complete": _cmd_task_complete,
    }

    # ------------------------------------------------------------------
    # invariants (used by fuzz tests and persistence validation)

    def check_invariants(self):
        assert sum(1 for v in self.held.values() if v) <= 2
        if self.mode == UNIFIED:
            assert self.active_space is None
        else:
            assert self.active_space in (NOTEBOOK_SPACE, ARTIFACT_SPACE)
        linked = {link.artifact_id for link in self.links}
        assert len(linked) == len(self.links), "duplicate links"
        for link in self.links:
            assert link.artifact_id in self.artifacts, "dangling link"
        for artifact in self.artifacts.values():
            has_origin = (artifact.origin_cell is not None
                          or getattr(artifact, "origin_table", None) is not None)
            if has_origin:
                assert artifact.id in linked, f"{artifact.id} missing link"
        for a in self.artifacts.values():
            if isinstance(a, art.VisArtifact):
                arity = 2 if a.kind == "Scatter2D" else 3
                assert len(a.extract.axis_names) == arity
                assert len(a.extract.points) == len(a.extract.colors)

"""Deterministic replay of event logs and the study's quantitative measures."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CommandError, CorruptLog
from .notebook import Notebook
from .session import Session

# First code/data manipulation within this window after a workspace change
# counts as an interactive transition; later ones in the same window do not.
MANIPULATE_WINDOW_MS = 5000

_INTERACTIVE_KINDS = frozenset(
    {"PullOut", "PutInCreate", "PutInUpdate", "MergeVis", "AddAxis",
     "RemoveAxis"})
_MANIPULATE_KINDS = frozenset({"Edit", "Execute"})
_ARTIFACT_CREATING = frozenset({"PullOut", "MergeVis"})
_ARTIFACT_CONSUMING = frozenset({"PutInCreate", "PutInUpdate", "Delete"})


def _command_for(event: dict) -> dict:
    kind = event["kind"]
    t = event["t"]
    if kind == "Edit":
        return {"op": "edit", "t": t, "cell_id": event["cell_id"],
                "source": event["source"]}
    if kind == "Execute":
        return {"op": "execute", "t": t, "cell_id": event["cell_id"]}
    if kind == "PullOut":
        return {"op": "pull_out", "t": t, "cell_id": event["cell_id"],
                "pose": event["pose"]}
    if kind in ("PutInCreate", "PutInUpdate"):
        return {"op": "put_in", "t": t, "artifact_id": event["artifact_id"],
                "cell_id": event["cell_id"]}
    if kind == "Grab":
        return {"op": "grab", "t": t, "hand": event["hand"],
                "item": event["item"]}
    if kind == "Release":
        return {"op": "release", "t": t, "hand": event["hand"]}
    if kind == "PortalCross":
        if event["direction"] == "enter":
            return {"op": "enter_cell", "t": t, "cell_id": event["cell_id"]}
        return {"op": "exit_portal", "t": t}
    if kind == "FocusChange":
        return {"op": "set_focus", "t": t, "region": event["region"],
                "dwell_ms": event["dwell_ms"]}
    if kind == "Move":
        return {"op": "move", "t": t, "pose": event["pose"]}
    if kind == "SortTable":
        return {"op": "sort_table", "t": t, "artifact_id": event["artifact_id"],
                "column": event["column"], "direction": event["direction"]}
    if kind == "FilterRows":
        return {"op": "filter_rows", "t": t,
                "artifact_id": event["artifact_id"], "column": event["column"],
                "comparator": event["comparator"],
                "threshold": event["threshold"]}
    if kind == "SelectColumn":
        return {"op": "select_column", "t": t,
                "artifact_id": event["artifact_id"],
                "column": event["column"]}
    if kind == "MergeVis":
        return {"op": "merge_columns", "t": t, "table_id": event["table_id"],
                "col_a": event["col_a"], "col_b": event["col_b"],
                "pose": event["pose"]}
    if kind == "AddAxis":
        return {"op": "add_axis", "t": t, "vis_id": event["vis_id"],
                "table_id": event["table_id"], "column": event["column"]}
    if kind == "RemoveAxis":
        return {"op": "remove_axis", "t": t, "vis_id": event["vis_id"],
                "axis_index": event["axis_index"]}
    if kind == "RemovePoint":
        return {"op": "remove_point", "t": t, "vis_id": event["vis_id"],
                "point_index": event["point_index"]}
    if kind == "ApplyVisToTable":
        return {"op": "apply_vis", "t": t, "vis_id": event["vis_id"],
                "table_id": event["table_id"]}
    if kind == "Delete":
        return {"op": "delete_artifact", "t": t,
                "artifact_id": event["artifact_id"]}
    if kind == "AnswerReported":
        return {"op": "answer", "t": t, "step": event["step"],
                "value": event["value"]}
    if kind == "TaskComplete":
        return {"op": "task_complete", "t": t}
    raise CommandError("UnknownEvent", f"kind {kind!r}")


def replay(log, initial_notebook: Notebook, mode: str = "unified",
           dwell_ms: int | None = None) -> Session:
    """Re-drive a fresh session from its event log; the result must match
    the live session exactly (checked event-by-event)."""
    session = Session(initial_notebook, mode=mode, dwell_ms=dwell_ms)
    last_t = 0
    for i, event in enumerate(log, start=1):
        if not isinstance(event, dict) or "kind" not in event or "t" not in event:
            raise CorruptLog(i, "event must have 't' and 'kind'")
        if event["t"] < last_t:
            raise CorruptLog(i, f"timestamp decreases ({event['t']} < {last_t})")
        last_t = event["t"]
        try:
            command = _command_for(event)
            produced = session.dispatch(command)
        except KeyError as exc:
            raise CorruptLog(i, f"missing field {exc}") from exc
        except CommandError as exc:
            raise CorruptLog(i, f"{exc.code}: {exc.message}") from exc
        if len(produced) != 1 or produced[0] != event:
            raise CorruptLog(i, f"replay diverged on {event['kind']}")
    return session


def read_log(path) -> list:
    events = []
    with open(path, encoding="utf-8") as f:
        for i, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorruptLog(i, f"invalid JSON: {exc}") from exc
    return events


def write_log(events, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for event in events:
            f.write(json.dumps(event, sort_keys=True) + "\n")


@dataclass
class MetricsReport:
    completion_time_s: float
    nav_transitions_per_min: float
    interactive_transitions_per_min: float
    deletes: int
    artifacts_left: int
    error_score: int
    nav_count: int = 0
    interactive_count: int = 0

    def to_dict(self):
        return {
            "completion_time_s": round(self.completion_time_s, 3),
            "nav_transitions_per_min": round(self.nav_transitions_per_min, 3),
            "interactive_transitions_per_min":
                round(self.interactive_transitions_per_min, 3),
            "deletes": self.deletes,
            "artifacts_left": self.artifacts_left,
            "error_score": self.error_score,
            "nav_count": self.nav_count,
            "interactive_count": self.interactive_count,
        }

    def to_table(self) -> str:
        rows = [
            ("completion time (s)", f"{self.completion_time_s:.3f}"),
            ("navigational transitions/min",
             f"{self.nav_transitions_per_min:.3f}"),
            ("interactive transitions/min",
             f"{self.interactive_transitions_per_min:.3f}"),
            ("deletes", str(self.deletes)),
            ("artifacts left", str(self.artifacts_left)),
            ("error score", str(self.error_score)),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value:>10}"
                         for name, value in rows)


def compute_metrics(log, ground_truth: dict | None = None,
                    window_ms: int = MANIPULATE_WINDOW_MS) -> MetricsReport:
    # ground_truth None means "unknown": answers are then not scored at all
    end_t = None
    for event in log:
        if event.get("kind") == "TaskComplete":
            end_t = event["t"]
    if end_t is None:
        raise CommandError("NoCompletionMarker", "log has no TaskComplete")

    nav = interactive = deletes = errors = 0
    created = consumed = 0
    last_transition_t = None
    manipulated_since_transition = False
    for event in log:
        t = event["t"]
        if t > end_t:
            break
        kind = event["kind"]
        if kind == "FocusChange":
            nav += 1
            last_transition_t = t
            manipulated_since_transition = False
        elif kind == "PortalCross":
            if event.get("held", 0) == 0:
                nav += 1
            last_transition_t = t
            manipulated_since_transition = False
        elif kind in _INTERACTIVE_KINDS:
            interactive += 1
        elif kind in _MANIPULATE_KINDS:
            if (last_transition_t is not None
                    and not manipulated_since_transition
                    and t - last_transition_t <= window_ms):
                interactive += 1
            manipulated_since_transition = True
        if kind == "Delete":
            deletes += 1
        if kind in _ARTIFACT_CREATING:
            created += 1
        if kind == "PortalCross" and event.get("direction") == "enter":
            created += 1
        if kind in _ARTIFACT_CONSUMING:
            consumed += 1
        if kind == "AnswerReported" and ground_truth is not None:
            step = event.get("step")
            if step not in ground_truth or ground_truth[step] != event.get("value"):
                errors += 1

    minutes = end_t / 60000.0
    nav_rate = nav / minutes if minutes > 0 else 0.0
    int_rate = interactive / minutes if minutes > 0 else 0.0
    return MetricsReport(
        completion_time_s=end_t / 1000.0,
        nav_transitions_per_min=nav_rate,
        interactive_transitions_per_min=int_rate,
        deletes=deletes,
        artifacts_left=created - consumed,
        error_score=errors,
        nav_count=nav,
        interactive_count=interactive,
    )

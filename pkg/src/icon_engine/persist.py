"""Session snapshots: canonical JSON serialization, state hash, save/load."""

from __future__ import annotations

import hashlib
import json

from . import artifacts as art
from .errors import SchemaError
from .kernel import LabelsValue, PlotExtract, TableExtract, TableValue
from .notebook import Notebook, Pose, notebook_from_dict, notebook_to_dict
from .session import Session

FORMAT = "icon-session-v1"


def _value_to_dict(value):
    if isinstance(value, TableValue):
        return {"type": "table",
                "columns": [list(c) for c in value.columns],
                "rows": [list(r) for r in value.rows],
                "row_ids": list(value.row_ids)}
    if isinstance(value, LabelsValue):
        return {"type": "labels", "labels": list(value.labels)}
    if isinstance(value, int):
        return {"type": "int", "value": value}
    raise SchemaError("/env", f"unserializable value {type(value).__name__}")


def _value_from_dict(d):
    if d["type"] == "table":
        return TableValue(tuple((c[0], c[1]) for c in d["columns"]),
                          tuple(tuple(r) for r in d["rows"]),
                          tuple(d["row_ids"]))
    if d["type"] == "labels":
        return LabelsValue(tuple(d["labels"]))
    if d["type"] == "int":
        return d["value"]
    raise SchemaError("/env", f"unknown value type {d['type']!r}")


def _plot_to_dict(e: PlotExtract):
    return {"kind": e.kind, "axis_names": list(e.axis_names),
            "points": [list(p) for p in e.points], "colors": list(e.colors),
            "row_ids": list(e.row_ids), "edges": [list(p) for p in e.edges],
            "knn_k": e.knn_k}


def _plot_from_dict(d) -> PlotExtract:
    return PlotExtract(d["kind"], tuple(d["axis_names"]),
                       tuple(tuple(p) for p in d["points"]),
                       tuple(d["colors"]), tuple(d["row_ids"]),
                       tuple(tuple(p) for p in d["edges"]), d["knn_k"])


def _artifact_to_dict(a):
    if isinstance(a, art.TableArtifact):
        return {"type": "table", "id": a.id,
                "extract": {"columns": [list(c) for c in a.extract.columns],
                            "rows": [list(r) for r in a.extract.rows],
                            "row_ids": list(a.extract.row_ids)},
                "pose": a.pose.to_dict(),
                "origin_cell": a.origin_cell, "origin_var": a.origin_var,
                "sort_state": list(a.sort_state) if a.sort_state else None,
                "row_filters": [list(f) for f in a.row_filters],
                "selected_columns": list(a.selected_columns),
                "removed_row_ids": sorted(a.removed_row_ids),
                "space": a.space}
    return {"type": "vis", "id": a.id, "kind": a.kind,
            "extract": _plot_to_dict(a.extract), "pose": a.pose.to_dict(),
            "origin_cell": a.origin_cell, "origin_table": a.origin_table,
            "initial_row_ids": list(a.initial_row_ids), "space": a.space}


def _artifact_from_dict(d):
    pose = Pose.from_dict(d["pose"])
    if d["type"] == "table":
        ex = d["extract"]
        a = art.TableArtifact(
            id=d["id"],
            extract=TableExtract(tuple((c[0], c[1]) for c in ex["columns"]),
                                 tuple(tuple(r) for r in ex["rows"]),
                                 tuple(ex["row_ids"])),
            pose=pose, origin_cell=d["origin_cell"],
            origin_var=d["origin_var"],
            sort_state=tuple(d["sort_state"]) if d["sort_state"] else None,
            row_filters=[tuple(f) for f in d["row_filters"]],
            selected_columns=list(d["selected_columns"]),
            removed_row_ids=set(d["removed_row_ids"]), space=d["space"])
        return a
    extract = _plot_from_dict(d["extract"])
    return art.VisArtifact(id=d["id"], kind=d["kind"], extract=extract,
                           pose=pose, origin_cell=d["origin_cell"],
                           origin_table=d["origin_table"],
                           initial_row_ids=tuple(d["initial_row_ids"]),
                           space=d["space"])


def snapshot_session(session: Session) -> dict:
    return {
        "format": FORMAT,
        "notebook": notebook_to_dict(session.notebook),
        "cells": {c.id: {"dirty": c.dirty} for c in session.notebook.cells()},
        "mode": session.mode,
        "active_space": session.active_space,
        "artifacts": [_artifact_to_dict(session.artifacts[k])
                      for k in sorted(session.artifacts)],
        "links": [[link.source_id, link.artifact_id]
                  for link in session.links],
        "held": session.held,
        "focus": session.focus,
        "user_pose": session.user_pose.to_dict(),
        "dwell_ms": session.dwell_ms,
        "env": {name: _value_to_dict(v)
                for name, v in sorted(session.kernel.env.items())},
        "displays": {cid: _plot_to_dict(e)
                     for cid, e in sorted(session.displays.items())},
        "artifact_seq": session.artifact_seq,
        "last_t": session.last_t,
        "events": list(session.events),
    }


def state_hash(session: Session) -> str:
    """Digest of everything except the event log (live vs replayed equality)."""
    doc = snapshot_session(session)
    doc.pop("events")
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def restore_session(doc: dict) -> Session:
    if doc.get("format") != FORMAT:
        raise SchemaError("/format", f"expected {FORMAT!r}")
    notebook = notebook_from_dict(doc["notebook"])
    session = Session(notebook, mode=doc["mode"], dwell_ms=doc["dwell_ms"])
    for cell in notebook.cells():
        state = doc.get("cells", {}).get(cell.id)
        if state is not None:
            cell.dirty = bool(state["dirty"])
    session.active_space = doc["active_space"]
    for a in doc["artifacts"]:
        artifact = _artifact_from_dict(a)
        session.artifacts[artifact.id] = artifact
    for source_id, artifact_id in doc["links"]:
        if artifact_id not in session.artifacts:
            raise SchemaError("/links", f"dangling link to {artifact_id!r}")
        session.links.append(art.Link(source_id, artifact_id))
    held = doc.get("held", {})
    for hand in ("L", "R"):
        session.held[hand] = held.get(hand)
    session.focus = doc["focus"]
    session.user_pose = Pose.from_dict(doc["user_pose"])
    session.kernel.env = {name: _value_from_dict(v)
                          for name, v in doc["env"].items()}
    session.displays = {cid: _plot_from_dict(e)
                        for cid, e in doc["displays"].items()}
    session.artifact_seq = doc["artifact_seq"]
    session.last_t = doc["last_t"]
    session.events = list(doc["events"])
    return session


def save_session(session: Session, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(snapshot_session(session), f)
        f.write("\n")


def load_session(path) -> Session:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError("/", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("/", "expected an object")
    return restore_session(doc)

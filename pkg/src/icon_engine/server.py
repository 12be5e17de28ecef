"""Session service: full-duplex JSON frames over a websocket.

Client frames:   {"seq": n, "command": {...}}
Reply frames:    {"seq": n, "ok": true, "events": [...]}
                 {"seq": n, "ok": false, "error": {"code", "message"}}
Broadcast:       {"event": {...}} streamed to every connected client in order.

Special commands handled by the service rather than the state machine:
  {"op": "snapshot"}                    -> current scene state (read-only)
  {"op": "reopen", "mode": "separated"} -> fresh session from the same notebook
"""

from __future__ import annotations

import asyncio

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import artifacts as art
from .errors import CommandError, IconError
from .notebook import load_notebook
from .session import SEPARATED, Session


def _scene_snapshot(session: Session) -> dict:
    cells = []
    for window in session.notebook.windows:
        for cell in window.cells:
            cells.append({"id": cell.id, "window": window.id,
                          "kind": cell.kind.value, "source": cell.source,
                          "dirty": cell.dirty,
                          "pose": window.pose.to_dict()})
    artifacts = []
    for a in session.artifacts.values():
        entry = {"id": a.id, "pose": a.pose.to_dict(), "space": a.space,
                 "origin_cell": a.origin_cell}
        if isinstance(a, art.TableArtifact):
            entry["type"] = "table"
            entry["columns"] = [list(c) for c in a.extract.columns]
            rows, _ = a.displayed()
            entry["rows"] = [list(r) for r in rows]
            entry["selected_columns"] = list(a.selected_columns)
        else:
            entry["type"] = "vis"
            entry["kind"] = a.kind
            entry["origin_table"] = a.origin_table
            entry["axis_names"] = list(a.extract.axis_names)
            entry["points"] = [list(p) for p in a.extract.points]
            entry["colors"] = list(a.extract.colors)
            entry["edges"] = [list(e) for e in a.extract.edges]
        artifacts.append(entry)
    return {
        "mode": session.mode,
        "active_space": session.active_space,
        "portal_visible": session.mode == SEPARATED,
        "user_pose": session.user_pose.to_dict(),
        "cells": cells,
        "artifacts": artifacts,
        "links": [{"source": l.source_id, "artifact": l.artifact_id}
                  for l in session.links],
    }


class SessionHub:
    """One live session plus its subscriber set."""

    def __init__(self, notebook_path: str, mode: str = "unified"):
        self.notebook_path = notebook_path
        self.session = Session(load_notebook(notebook_path), mode=mode)
        self.clients: list[WebSocket] = []
        self.lock = asyncio.Lock()

    def reopen(self, mode: str):
        self.session = Session(load_notebook(self.notebook_path), mode=mode)

    async def broadcast(self, events):
        for event in events:
            frame = {"event": event}
            for client in list(self.clients):
                try:
                    await client.send_json(frame)
                except Exception:
                    if client in self.clients:
                        self.clients.remove(client)

    async def handle(self, frame: dict) -> tuple[dict, list]:
        seq = frame.get("seq")
        command = frame.get("command")
        if not isinstance(command, dict):
            return ({"seq": seq, "ok": False,
                     "error": {"code": "BadFrame",
                               "message": "missing command object"}}, [])
        op = command.get("op")
        try:
            if op == "snapshot":
                return ({"seq": seq, "ok": True,
                         "snapshot": _scene_snapshot(self.session)}, [])
            if op == "reopen":
                self.reopen(command.get("mode", self.session.mode))
                return ({"seq": seq, "ok": True,
                         "snapshot": _scene_snapshot(self.session)}, [])
            events = self.session.dispatch(command)
            return ({"seq": seq, "ok": True, "events": events}, events)
        except CommandError as exc:
            return ({"seq": seq, "ok": False,
                     "error": {"code": exc.code, "message": exc.message}}, [])
        except IconError as exc:
            return ({"seq": seq, "ok": False,
                     "error": {"code": type(exc).__name__,
                               "message": str(exc)}}, [])


def create_app(notebook_path: str, mode: str = "unified") -> FastAPI:
    app = FastAPI(title="icon-session-service")
    hub = SessionHub(notebook_path, mode)
    app.state.hub = hub

    @app.get("/health")
    async def health():
        return {"ok": True, "mode": hub.session.mode}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        hub.clients.append(ws)
        try:
            while True:
                frame = await ws.receive_json()
                # commands are serialized per session: total order for all
                async with hub.lock:
                    reply, events = await hub.handle(frame)
                    await ws.send_json(reply)
                    await hub.broadcast(events)
        except WebSocketDisconnect:
            pass
        finally:
            if ws in hub.clients:
                hub.clients.remove(ws)

    return app

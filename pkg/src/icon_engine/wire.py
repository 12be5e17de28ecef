"""Kernel wire protocol: newline-delimited JSON over stdio.

Requests:  {"id", "op": "execute"|"extract_table"|"extract_plot"|"reset", ...}
Responses: {"id", "ok": true, ...payload} or {"id", "ok": false, "error": msg}

This module serves the protocol over the in-process mock kernel, so external
adapters have a reference peer to differential-test against. Numbers are
serialized by json's repr path, i.e. shortest round-trip decimals.
"""

from __future__ import annotations

import json
import sys

from .errors import KernelError
from .kernel import MockKernel, PlotExtract


def _plot_payload(display: PlotExtract) -> dict:
    return {"kind": display.kind, "axis_names": list(display.axis_names),
            "points": [list(p) for p in display.points],
            "colors": list(display.colors),
            "edges": [list(e) for e in display.edges],
            "knn_k": display.knn_k}


class WireKernel:
    """One request at a time against a private kernel environment."""

    def __init__(self):
        self.kernel = MockKernel()
        self.last_display: PlotExtract | None = None

    def handle(self, request: dict) -> dict:
        rid = request.get("id")
        op = request.get("op")
        try:
            if op == "execute":
                result = self.kernel.execute_source(
                    request.get("cell_id", ""), request.get("source", ""))
                if result.status == "Error":
                    return {"id": rid, "ok": False, "error": result.message}
                if result.display is not None:
                    self.last_display = result.display
                return {"id": rid, "ok": True,
                        "defined": list(result.defined_vars),
                        "display": (_plot_payload(result.display)
                                    if result.display else None)}
            if op == "extract_table":
                extract = self.kernel.extract_table(request["var"])
                return {"id": rid, "ok": True,
                        "columns": [{"name": n, "dtype": d}
                                    for n, d in extract.columns],
                        "rows": [list(r) for r in extract.rows]}
            if op == "extract_plot":
                if self.last_display is None:
                    return {"id": rid, "ok": False,
                            "error": "no visualization has been executed"}
                return {"id": rid, "ok": True,
                        **_plot_payload(self.last_display)}
            if op == "reset":
                self.kernel.reset()
                self.last_display = None
                return {"id": rid, "ok": True}
            return {"id": rid, "ok": False, "error": f"unknown op {op!r}"}
        except KernelError as exc:
            return {"id": rid, "ok": False, "error": str(exc)}
        except KeyError as exc:
            return {"id": rid, "ok": False, "error": f"missing field {exc}"}


def serve(stdin=None, stdout=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    wire = WireKernel()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response = {"id": None, "ok": False, "error": f"bad JSON: {exc}"}
        else:
            response = wire.handle(request)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


if __name__ == "__main__":
    serve()

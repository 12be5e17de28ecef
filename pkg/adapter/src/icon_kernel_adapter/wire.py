"""Newline-delimited JSON wire protocol over stdio, pandas-backed.

Speaks the same request/response shapes as the engine's built-in kernel:
requests {"id", "op": "execute"|"extract_table"|"extract_plot"|"reset"},
responses {"id", "ok": true, ...} or {"id", "ok": false, "error": msg}.
"""

from __future__ import annotations

import json
import sys

from .kernel import AdapterError, AdapterKernel


class WireAdapter:
    def __init__(self):
        self.kernel = AdapterKernel()

    def handle(self, request: dict) -> dict:
        rid = request.get("id")
        op = request.get("op")
        try:
            if op == "execute":
                defined, display = self.kernel.execute_source(
                    request.get("source", ""))
                return {"id": rid, "ok": True, "defined": defined,
                        "display": display.payload() if display else None}
            if op == "extract_table":
                columns, rows = self.kernel.extract_table(request["var"])
                return {"id": rid, "ok": True,
                        "columns": columns, "rows": rows}
            if op == "extract_plot":
                if self.kernel.last_display is None:
                    return {"id": rid, "ok": False,
                            "error": "no visualization has been executed"}
                return {"id": rid, "ok": True,
                        **self.kernel.last_display.payload()}
            if op == "reset":
                self.kernel.reset()
                return {"id": rid, "ok": True}
            return {"id": rid, "ok": False, "error": f"unknown op {op!r}"}
        except AdapterError as exc:
            return {"id": rid, "ok": False, "error": str(exc)}
        except KeyError as exc:
            return {"id": rid, "ok": False, "error": f"missing field {exc}"}


def serve(stdin=None, stdout=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    wire = WireAdapter()
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


def main():
    serve()


if __name__ == "__main__":
    main()

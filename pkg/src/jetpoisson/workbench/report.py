"""JSON reports with a fixed field order."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager

SCHEMA = "jetpoisson.report/1"


class Report:
    """Accumulates checks for one invocation and serializes them deterministically.

    Wall-clock timings are recorded only when ``timing`` is set, so that two runs on the
    same input produce byte-identical output by default.
    """

    def __init__(self, command: str, args: dict, setup=None, signature=None, timing: bool = False):
        self.command = command
        self.args = args
        self.setup = setup
        self.signature = signature
        self.timing = timing
        self.checks: list[dict] = []
        self.result: dict = {}
        self.witness = None
        self.exit_code = 0

    def add_check(self, name: str, verdict: str, residual: str | None = None, **extra) -> dict:
        check = {"name": name, "verdict": verdict}
        if residual is not None:
            check["residual"] = residual
        check.update(extra)
        self.checks.append(check)
        return check

    @contextmanager
    def timed(self, name: str):
        """Run a block and attach ``seconds`` to the last check it added."""
        start = time.perf_counter()
        before = len(self.checks)
        yield
        if self.timing and len(self.checks) > before:
            self.checks[-1]["seconds"] = round(time.perf_counter() - start, 6)

    def to_dict(self) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "args": self.args,
            "setup": None,
            "signature": None,
            "checks": self.checks,
            "result": self.result,
            "witness": self.witness,
            "exit_code": self.exit_code,
        }
        if self.setup is not None:
            out["setup"] = {"source": self.setup.source, "digest": self.setup.digest}
        if self.signature is not None:
            out["signature"] = {"independent": list(self.signature.independent),
                                "dependent": list(self.signature.dependent)}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command}"]
        if self.setup is not None:
            lines.append(f"setup: {self.setup.source} ({self.setup.digest})")
        for key, val in self.result.items():
            lines.append(f"{key}: {_plain(val)}")
        for c in self.checks:
            line = f"[{c['verdict']}] {c['name']}"
            if "residual" in c:
                line += f": {c['residual']}"
            lines.append(line)
        if self.witness:
            lines.append("witness: " + "; ".join(self.witness))
        return "\n".join(lines) + "\n"


def _plain(val) -> str:
    if isinstance(val, (list, tuple)):
        return "(" + ", ".join(_plain(v) for v in val) + ")"
    if isinstance(val, dict):
        return "{" + ", ".join(f"{k}: {_plain(v)}" for k, v in val.items()) + "}"
    return str(val)

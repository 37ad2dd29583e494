"""Run provenance: checksums and newline-delimited JSON trace files.

Content files stay byte-reproducible, so anything time- or host-dependent
(argv, checksums, timestamps, exit codes) is written to a sidecar
``*.ndjson`` trace instead. One JSON object per line; consumers may tail or
forward the stream to an observability platform.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from pathlib import Path

# Optional telemetry forwarding: when set, every trace record is also passed
# to this callable (e.g. an OpenTelemetry exporter). Failures in the hook
# must not break the run that is being traced.
_forward_hook = None


def set_forward_hook(hook) -> None:
    global _forward_hook
    _forward_hook = hook


def utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="microseconds")


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_record(path: str | Path, relative_to: str | Path | None = None) -> dict:
    path = Path(path)
    shown = path
    if relative_to is not None:
        try:
            shown = path.relative_to(relative_to)
        except ValueError:
            pass
    return {"path": str(shown), "bytes": path.stat().st_size, "sha256": sha256_file(path)}


class TraceWriter:
    """Append-only NDJSON writer for one run or CLI invocation."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        # fresh file per run; a trace never spans invocations
        self.path.write_text("", encoding="utf-8")

    def emit(self, event: str, **fields) -> None:
        record = {"ts": utc_now(), "event": event, **fields}
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        if _forward_hook is not None:
            try:
                _forward_hook(record)
            except Exception:
                pass


def write_cli_trace(
    trace_path: str | Path,
    argv: list[str],
    inputs: list[str | Path],
    outputs: list[str | Path],
) -> None:
    """Standard sidecar for a CLI subcommand that wrote files."""
    writer = TraceWriter(trace_path)
    writer.emit("invocation", argv=list(argv))
    for path in inputs:
        writer.emit("input", **file_record(path))
    for path in outputs:
        writer.emit("output", **file_record(path))
    writer.emit("done")

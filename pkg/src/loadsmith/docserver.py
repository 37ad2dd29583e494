"""Versioned design-practice document catalog served over JSON-RPC 2.0.

Catalog layout on disk (version-controlled, diff-friendly):

.. code-block:: text

    catalog/
      catalog.json          # [{"document_id": 1001, "title": "...", "versions": [1]}]
      docs/1001/v1.md       # content of document 1001, version 1

The server answers two read-only methods, ``browse_catalog`` and
``get_document_content``, one JSON-RPC message per line over stdio.
Repeated identical requests yield byte-identical responses; nothing ever
mutates the catalog.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LoadsmithError

# JSON-RPC 2.0 error codes (plus two application codes in the server range)
PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
DOCUMENT_NOT_FOUND = -32001
VERSION_NOT_FOUND = -32002


@dataclass(frozen=True)
class DocumentVersion:
    content: str
    checksum: str
    added_at: str | None = None


@dataclass(frozen=True)
class DocumentRecord:
    document_id: int
    title: str
    versions: dict[int, DocumentVersion] = field(default_factory=dict)

    def __post_init__(self):
        if self.document_id < 1:
            raise LoadsmithError(
                f"document_id must be positive, got {self.document_id}",
                code="CATALOG_ERROR",
            )
        if not self.versions:
            raise LoadsmithError(
                f"document {self.document_id} has no versions", code="CATALOG_ERROR"
            )
        if any(v < 1 for v in self.versions):
            raise LoadsmithError(
                f"document {self.document_id} has non-positive version numbers",
                code="CATALOG_ERROR",
            )


class Catalog:
    """Immutable in-memory view of a catalog directory."""

    def __init__(self, records: dict[int, DocumentRecord]):
        self._records = dict(records)

    @classmethod
    def load(cls, catalog_dir: str | Path) -> "Catalog":
        catalog_dir = Path(catalog_dir)
        index_path = catalog_dir / "catalog.json"
        try:
            index = json.loads(index_path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise LoadsmithError(
                f"catalog index not found: {index_path}", code="CATALOG_ERROR"
            ) from exc
        except json.JSONDecodeError as exc:
            raise LoadsmithError(
                f"catalog index is not valid JSON: {exc.msg}", code="CATALOG_ERROR"
            ) from exc
        if not isinstance(index, list):
            raise LoadsmithError(
                "catalog.json must be a list of document entries", code="CATALOG_ERROR"
            )

        records: dict[int, DocumentRecord] = {}
        for entry in index:
            doc_id = entry.get("document_id")
            title = entry.get("title")
            versions = entry.get("versions")
            if not isinstance(doc_id, int) or not isinstance(title, str) or not versions:
                raise LoadsmithError(
                    f"malformed catalog entry: {entry!r}", code="CATALOG_ERROR"
                )
            if doc_id in records:
                raise LoadsmithError(
                    f"duplicate document_id {doc_id} in catalog", code="CATALOG_ERROR"
                )
            loaded: dict[int, DocumentVersion] = {}
            for version in versions:
                content_path = catalog_dir / "docs" / str(doc_id) / f"v{version}.md"
                try:
                    content = content_path.read_text(encoding="utf-8")
                except FileNotFoundError as exc:
                    raise LoadsmithError(
                        f"content file missing for document {doc_id} v{version}: {content_path}",
                        code="CATALOG_ERROR",
                    ) from exc
                checksum = hashlib.sha256(content.encode("utf-8")).hexdigest()
                added_at = (entry.get("added_at") or {}).get(str(version))
                loaded[int(version)] = DocumentVersion(content, checksum, added_at)
            records[doc_id] = DocumentRecord(doc_id, title, loaded)
        return cls(records)

    def browse_catalog(self) -> list[dict]:
        """All records sorted by id: ids, titles and version lists, no bodies."""
        return [
            {
                "document_id": record.document_id,
                "title": record.title,
                "versions": sorted(record.versions),
            }
            for record in sorted(self._records.values(), key=lambda r: r.document_id)
        ]

    def get_document_content(self, document_id: int, version: int) -> DocumentVersion:
        if document_id not in self._records:
            raise KeyError(document_id)
        record = self._records[document_id]
        if version not in record.versions:
            raise LookupError(sorted(record.versions))
        return record.versions[version]


class DocServer:
    """Line-delimited JSON-RPC front end over a loaded catalog."""

    def __init__(self, catalog: Catalog, verify_checksums: bool = False):
        self.catalog = catalog
        self.verify_checksums = verify_checksums

    def _error(self, request_id, code: int, message: str, data=None) -> str:
        error: dict = {"code": code, "message": message}
        if data is not None:
            error["data"] = data
        return json.dumps(
            {"jsonrpc": "2.0", "id": request_id, "error": error}, ensure_ascii=False
        )

    def _result(self, request_id, result) -> str:
        return json.dumps(
            {"jsonrpc": "2.0", "id": request_id, "result": result}, ensure_ascii=False
        )

    def handle_line(self, line: str) -> str | None:
        """Answer one JSON-RPC request line; None for empty input lines."""
        line = line.strip()
        if not line:
            return None
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            return self._error(None, PARSE_ERROR, "parse error: request is not valid JSON")
        if not isinstance(request, dict) or request.get("jsonrpc") != "2.0":
            return self._error(
                request.get("id") if isinstance(request, dict) else None,
                INVALID_REQUEST,
                "invalid request: expected a JSON-RPC 2.0 object",
            )

        request_id = request.get("id")
        method = request.get("method")
        params = request.get("params") or {}

        if method == "browse_catalog":
            return self._result(request_id, self.catalog.browse_catalog())

        if method == "get_document_content":
            if not isinstance(params, dict):
                return self._error(request_id, INVALID_PARAMS, "params must be an object")
            document_id = params.get("document_id")
            version = params.get("version")
            if not isinstance(document_id, int) or not isinstance(version, int):
                return self._error(
                    request_id,
                    INVALID_PARAMS,
                    "document_id and version must be integers",
                )
            try:
                doc = self.catalog.get_document_content(document_id, version)
            except KeyError:
                return self._error(
                    request_id, DOCUMENT_NOT_FOUND, f"no document with id {document_id}"
                )
            except LookupError as exc:
                return self._error(
                    request_id,
                    VERSION_NOT_FOUND,
                    f"document {document_id} has no version {version}",
                    data={"available_versions": exc.args[0]},
                )
            if self.verify_checksums:
                actual = hashlib.sha256(doc.content.encode("utf-8")).hexdigest()
                if actual != doc.checksum:
                    return self._error(
                        request_id, -32000, "stored content failed checksum verification"
                    )
            return self._result(
                request_id,
                {
                    "document_id": document_id,
                    "version": version,
                    "content": doc.content,
                    "checksum": doc.checksum,
                },
            )

        return self._error(request_id, METHOD_NOT_FOUND, f"method not found: {method!r}")


def serve(catalog_dir: str | Path, stdin=None, stdout=None, verify_checksums: bool = False) -> None:
    """Run the request loop until stdin closes.

    Catalog load errors abort startup with a diagnostic (raised); per-request
    problems are answered as JSON-RPC error objects.
    """
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    server = DocServer(Catalog.load(catalog_dir), verify_checksums=verify_checksums)
    for line in stdin:
        response = server.handle_line(line)
        if response is not None:
            stdout.write(response + "\n")
            stdout.flush()

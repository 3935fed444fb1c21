"""Shipped sample corpus and its integrity manifest.

The package bundles three sample logs, a worked-example annotation
bundle, valid/invalid counterparts for every documented schema, the
literature capability matrix, and a manifest of SHA-256 digests so
tampered or missing fixtures are detected rather than silently used.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingFixtureError, SchemaError

MANIFEST_SCHEMA_ID = "susmine-manifest/1"
MANIFEST_NAME = "MANIFEST.json"


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    sha256: str
    description: str


def data_root() -> Path:
    """Root of the shipped data directory (source / regular install)."""
    return Path(__file__).parent / "data"


def fixture_path(rel: str) -> Path:
    return data_root() / rel


def load_manifest(root: Path | None = None) -> list[ManifestEntry]:
    root = root or data_root()
    raw = json.loads((root / MANIFEST_NAME).read_text("utf-8"))
    if not isinstance(raw, dict) or raw.get("schema") != MANIFEST_SCHEMA_ID:
        raise SchemaError(f"manifest must declare \"schema\": \"{MANIFEST_SCHEMA_ID}\"")
    entries = []
    for item in raw.get("files", []):
        entries.append(ManifestEntry(item["path"], item["sha256"], item.get("description", "")))
    return entries


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def verify_fixtures(
    manifest: list[ManifestEntry] | None = None, root: Path | None = None
) -> dict[str, bool]:
    """Digest-compare every manifest entry; absent files raise
    :class:`MissingFixtureError`, mismatches report as False."""
    root = root or data_root()
    manifest = manifest if manifest is not None else load_manifest(root)
    results: dict[str, bool] = {}
    for entry in manifest:
        path = root / entry.path
        if not path.is_file():
            raise MissingFixtureError(f"fixture '{entry.path}' listed in manifest but absent")
        results[entry.path] = _digest(path) == entry.sha256
    return results


_DESCRIPTIONS = {
    "ocel/minimal.json": "smallest valid log: one event, one object, one relation",
    "ocel/mineral_water.json": "demo log: three bottle fillings on a shared machine, then one order delivery",
    "ocel/orders.json": "two order fulfilment traces sharing a delivery truck",
    "ocel/invalid_dangling_relation.json": "invalid log: relation to an undefined object",
    "annotations/mineral_water.json": "demo bundle: scoped climate, ozone and work-accident figures on the delivery event",
    "annotations/machine_allocation.json": "demo bundle: embodied machine impact split equally over the events using it",
    "annotations/invalid_unknown_scope.json": "invalid bundle: scope label outside the ghg preset",
    "annotations/factors.csv": "characterization table in CSV form",
    "annotations/invalid_factors.csv": "invalid CSV table: undeclared impact class",
    "literature/approaches.json": "published sustainable-process-modelling approaches scored per analysis pattern",
}


def write_manifest(root: Path | None = None) -> Path:
    """Regenerate the manifest over the shipped files (dev helper)."""
    root = root or data_root()
    files = sorted(
        p.relative_to(root).as_posix()
        for p in root.rglob("*")
        if p.is_file() and p.name != MANIFEST_NAME
    )
    doc = {
        "schema": MANIFEST_SCHEMA_ID,
        "files": [
            {"path": rel, "sha256": _digest(root / rel), "description": _DESCRIPTIONS.get(rel, "")}
            for rel in files
        ],
    }
    out = root / MANIFEST_NAME
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


if __name__ == "__main__":
    path = write_manifest()
    print(f"wrote {path}")

"""Run manifests: the provenance record written beside command outputs.

A manifest captures everything that determines a command's outputs --
argv, the normalized config snapshot, seeds, and the content hash of
every input file -- plus the hash of every output actually written.
The determinism contract of the whole toolkit is phrased through it:
two runs whose manifests agree on the input side must agree on the
output hashes. Deliberately absent: timestamps, hostnames, usernames,
anything that would make identical runs look different.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Mapping, Sequence

from . import __version__

MANIFEST_SUFFIX = ".manifest.json"


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _hash_files(files: Mapping[str, object]) -> dict:
    out = {}
    for name, path in files.items():
        out[name] = {"path": str(path), "sha256": file_sha256(path)}
    return out


def manifest_path(primary_output) -> str:
    return str(primary_output) + MANIFEST_SUFFIX


def write_manifest(
    primary_output,
    command: Sequence[str],
    inputs: Mapping[str, object],
    outputs: Mapping[str, object],
    config_snapshot: str | None = None,
    seeds: Mapping[str, int] | None = None,
) -> str:
    """Hash inputs and outputs and atomically write the manifest JSON.

    Placed next to the primary output as <output>.manifest.json. The
    write goes through a temp file in the same directory plus rename,
    so readers never observe a half-written manifest.
    """
    doc = {
        "tool": f"compsense {__version__}",
        "command": [str(a) for a in command],
        "config": config_snapshot,
        "seeds": dict(seeds or {}),
        "inputs": _hash_files(inputs),
        "outputs": _hash_files(outputs),
    }
    target = manifest_path(primary_output)
    directory = os.path.dirname(os.path.abspath(target)) or "."
    payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".manifest-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def read_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

"""Run manifests: inputs, hashes, seeds, and outputs for reproducible runs."""

import hashlib
import json
import time
from pathlib import Path


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_path, command, inputs=(), outputs=(), seed=None, extra=None):
    """Write a manifest JSON next to the outputs; returns its path."""
    from . import __version__

    entry = {
        "command": command,
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "master_seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs if p and Path(p).exists()},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    if extra:
        entry["extra"] = extra
    out_path = Path(out_path)
    out_path.write_text(json.dumps(entry, indent=2) + "\n")
    return out_path


def verify_manifest(path):
    """Recompute the recorded hashes; returns a list of mismatch strings."""
    entry = json.loads(Path(path).read_text())
    problems = []
    for section in ("inputs", "outputs"):
        for p, digest in entry.get(section, {}).items():
            if not Path(p).exists():
                problems.append(f"missing {section[:-1]}: {p}")
            elif _sha256(p) != digest:
                problems.append(f"hash mismatch for {p}")
    return problems

"""Flat-file cache of GramRecords, sharded by index.

One CSV per (model, 10^5-index shard) under the cache directory (default
~/.cache/gramdelta, overridden by GDL_CACHE_DIR or --cache-dir). Every float
is stored as a hex literal, so a re-read record equals recomputation bit for
bit.
"""

from __future__ import annotations

import csv
import os
import threading
from pathlib import Path

from .gram import GramKind, GramRecord

ENV_VAR = "GDL_CACHE_DIR"
SHARD = 100_000
_VERSION = "1"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "gramdelta"


class RecordStore:
    def __init__(self, cache_dir: str | os.PathLike | None = None):
        self.root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self._shards: dict[tuple[str, int], dict[int, GramRecord]] = {}
        self._lock = threading.Lock()

    def _path(self, model_name: str, shard: int) -> Path:
        return self.root / f"{model_name}_{shard:06d}.csv"

    def _load(self, model_name: str, shard: int) -> dict[int, GramRecord]:
        key = (model_name, shard)
        cached = self._shards.get(key)
        if cached is not None:
            return cached
        records: dict[int, GramRecord] = {}
        path = self._path(model_name, shard)
        if path.exists():
            with path.open(newline="") as fh:
                for row in csv.reader(r for r in fh if not r.startswith("#")):
                    if not row or row[0] == "n":
                        continue
                    rec = GramRecord(
                        n=int(row[0]), t=float.fromhex(row[1]),
                        z_value=float.fromhex(row[2]),
                        zprime_value=float.fromhex(row[3]),
                        kind=GramKind(row[4]), viscosity=float.fromhex(row[5]))
                    records[rec.n] = rec
        self._shards[key] = records
        return records

    def get(self, model_name: str, n: int) -> GramRecord | None:
        with self._lock:
            return self._load(model_name, n // SHARD).get(n)

    def put(self, model_name: str, record: GramRecord) -> None:
        with self._lock:
            shard = record.n // SHARD
            records = self._load(model_name, shard)
            if record.n in records:
                return
            records[record.n] = record
            path = self._path(model_name, shard)
            new = not path.exists()
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("a", newline="") as fh:
                writer = csv.writer(fh)
                if new:
                    fh.write(f"#version={_VERSION}\n#model={model_name}\n")
                    writer.writerow(["n", "t_hex", "z_hex", "zprime_hex",
                                     "kind", "viscosity_hex"])
                writer.writerow([record.n, record.t.hex(), record.z_value.hex(),
                                 record.zprime_value.hex(), record.kind.value,
                                 record.viscosity.hex()])

    def status(self) -> dict:
        files = sorted(self.root.glob("*_*.csv")) if self.root.exists() else []
        total = 0
        per_file = []
        for path in files:
            with path.open() as fh:
                count = sum(1 for line in fh
                            if line and not line.startswith("#")
                            and not line.startswith("n,"))
            per_file.append({"file": path.name, "records": count})
            total += count
        return {"cache_dir": str(self.root), "files": per_file, "records": total}

    def clear(self) -> int:
        removed = 0
        if self.root.exists():
            for path in self.root.glob("*_*.csv"):
                path.unlink()
                removed += 1
        self._shards.clear()
        return removed

"""Batch processing of a directory of scripts.

Three stages: parse and normalise every file, drop files whose normalised
text duplicates an earlier file (SHA-512 of the printed form, first path in
sorted order wins), then deobfuscate the survivors and measure them before
and after.  A failing file only ever produces a failed record.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from . import metrics as M
from .codegen import print_script
from .driver import PipelineConfig, deobfuscate
from .frontend import ParseError, load

OK, PARSE_FAILED, ITERATION_LIMIT, ERROR, DUPLICATE = (
    "ok", "parse-failed", "iteration-limit", "error", "duplicate")
SCHEMA_VERSION = 1


@dataclass
class CorpusRecord:
    path: str
    status: str
    checksum_normalized: Optional[str] = None
    before: Optional[M.MetricsReport] = None
    after: Optional[M.MetricsReport] = None
    iterations: int = 0
    message: Optional[str] = None
    duplicate_of: Optional[str] = None

    def to_json(self) -> dict:
        d = {"path": self.path, "status": self.status,
             "checksumNormalized": self.checksum_normalized,
             "before": self.before.to_json() if self.before else None,
             "after": self.after.to_json() if self.after else None,
             "iterations": self.iterations}
        if self.message:
            d["message"] = self.message
        if self.duplicate_of:
            d["duplicateOf"] = self.duplicate_of
        return d


@dataclass
class CorpusReport:
    records: list = field(default_factory=list)

    def by_status(self, status) -> list:
        return [r for r in self.records if r.status == status]

    def summary(self) -> dict:
        total = len(self.records)
        done = [r for r in self.records if r.status in (OK, ITERATION_LIMIT) and r.after]
        before = M.aggregate(r.before for r in done)
        after = M.aggregate(r.after for r in done)
        failed = len(self.by_status(PARSE_FAILED))
        return {
            "files": total,
            "parseFailed": failed,
            "parseFailureRate": (failed / total) if total else 0.0,
            "duplicates": len(self.by_status(DUPLICATE)),
            "ok": len(self.by_status(OK)),
            "iterationLimit": len(self.by_status(ITERATION_LIMIT)),
            "errors": len(self.by_status(ERROR)),
            "before": before.to_json(),
            "after": after.to_json(),
            "decrease": {M.TABLE_LABELS[k]: v.to_json()
                         for k, v in M.compare(before, after).items()},
        }

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "summary": self.summary(),
                "records": [r.to_json() for r in self.records]}

    def table(self) -> str:
        s = self.summary()
        lines = [f"files: {s['files']}  parse failures: {s['parseFailed']} "
                 f"({100 * s['parseFailureRate']:.2f}%)  duplicates: {s['duplicates']}  "
                 f"ok: {s['ok']}  iteration limit: {s['iterationLimit']}  errors: {s['errors']}",
                 "",
                 f"{'metric':<28} {'before':>14} {'after':>14} {'% decrease':>11}"]
        for label, d in s["decrease"].items():
            lines.append(f"{label:<28} {d['before']:>14.2f} {d['after']:>14.2f} "
                         f"{d['percentDecrease']:>10.2f}%")
        return "\n".join(lines)


def report_schema() -> dict:
    text = resources.files("jsdeob").joinpath("report_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def find_scripts(root) -> list:
    root = Path(root)
    return sorted(str(p) for p in root.rglob("*.js") if p.is_file())


# -- workers (module level so they can be sent to a process pool) --------------


def normalize_file(path: str):
    """Stage 1+2 for one file: ``(path, status, checksum, message)``."""
    try:
        script = load(Path(path).read_bytes(), path)
        text = print_script(script)
        return path, OK, hashlib.sha512(text.encode("utf-8")).hexdigest(), None
    except ParseError as err:
        return path, PARSE_FAILED, None, str(err)
    except Exception as err:  # noqa: BLE001 - any stage failure is a per-file record
        return path, ERROR, None, f"{type(err).__name__}: {err}"


def deobfuscate_file(args):
    """Stage 3 for one file: a finished CorpusRecord."""
    path, checksum, cfg = args
    rec = CorpusRecord(path, ERROR, checksum)
    try:
        script = load(Path(path).read_bytes(), path)
        rec.before = M.measure(script)
        out, report = deobfuscate(script, cfg)
        rec.after = M.measure(out)
        rec.iterations = report.iterations
        rec.status = OK if report.reached_fixed_point else ITERATION_LIMIT
    except Exception as err:  # noqa: BLE001
        rec.status = ERROR
        rec.after = None
        rec.message = f"{type(err).__name__}: {err}"
    return rec


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (jobs * 8))))


def run_corpus(root, cfg: PipelineConfig = PipelineConfig(), jobs: int = 1) -> CorpusReport:
    paths = find_scripts(root)
    jobs = max(1, jobs or os.cpu_count() or 1)
    stage1 = _map(normalize_file, paths, jobs)
    records = {}
    survivors = []
    first_by_sum = {}
    for path, status, checksum, message in stage1:  # already in sorted path order
        if status != OK:
            records[path] = CorpusRecord(path, status, message=message)
        elif checksum in first_by_sum:
            records[path] = CorpusRecord(path, DUPLICATE, checksum,
                                         duplicate_of=first_by_sum[checksum])
        else:
            first_by_sum[checksum] = path
            survivors.append((path, checksum, cfg))
    for rec in _map(deobfuscate_file, survivors, jobs):
        records[rec.path] = rec
    return CorpusReport([records[p] for p in paths])

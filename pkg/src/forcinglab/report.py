"""Campaign reports shared by every verification run."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class CampaignReport:
    id: str
    params: dict
    counts: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0
    max_counterexamples: int = 50

    @property
    def verdict(self) -> str:
        return "PASS" if not self.counterexamples and not self.counts.get("counterexamples_total") else "FAIL"

    def bump(self, key: str, n: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + n

    def add_counterexample(self, item: dict) -> None:
        self.bump("counterexamples_total")
        if len(self.counterexamples) < self.max_counterexamples:
            self.counterexamples.append(item)

    def to_json(self, meta: bool = True) -> dict:
        out: dict[str, Any] = {
            "id": self.id,
            "verdict": self.verdict,
            "params": self.params,
            "counts": dict(sorted(self.counts.items())),
            "counterexamples": self.counterexamples,
        }
        if self.notes:
            out["notes"] = self.notes
        if meta:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def dumps(self, meta: bool = True) -> str:
        return json.dumps(self.to_json(meta), indent=2, sort_keys=False, default=str)


def shard_slice(items: list, shard: tuple) -> list:
    """The ``k``-th of ``n`` contiguous blocks of ``items``."""
    k, n = shard
    size = -(-len(items) // n)
    return items[k * size : (k + 1) * size]


def merge_reports(parts: list) -> CampaignReport:
    """Combine shard reports in shard order; the result matches a serial run."""
    first = parts[0]
    out = CampaignReport(first.id, first.params, max_counterexamples=first.max_counterexamples)
    for part in parts:
        for k, v in part.counts.items():
            out.bump(k, v)
        for item in part.counterexamples:
            if len(out.counterexamples) < out.max_counterexamples:
                out.counterexamples.append(item)
        out.notes.extend(n for n in part.notes if n not in out.notes)
        out.wall_time = max(out.wall_time, part.wall_time)
    return out


def _run_shard(args):
    fn, kwargs, shard = args
    return fn(shard=shard, **kwargs)


def run_sharded(fn, jobs: int = 1, **kwargs) -> CampaignReport:
    """Run a shard-aware campaign over ``jobs`` processes and merge the parts."""
    if jobs <= 1:
        return fn(**kwargs)
    import multiprocessing

    tasks = [(fn, kwargs, (k, jobs)) for k in range(jobs)]
    with multiprocessing.get_context("fork").Pool(jobs) as pool:
        parts = pool.map(_run_shard, tasks)
    return merge_reports(parts)


class Timer:
    def __init__(self, report: Optional[CampaignReport] = None):
        self.report = report

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if self.report is not None:
            self.report.wall_time += self.elapsed

"""Temporal sorting of one page's revisions within a memory budget.

Small pages sort in memory; larger ones spill sorted runs to disk and
k-way merge them. When the run count itself exceeds a limit, records are
first partitioned into calendar-time stages and each stage is sorted on
its own, which bounds the number of simultaneously open run files. All
paths produce the same sequence: ascending (timestamp, revision_id), ties
resolved by revision id so output is reproducible.
"""

from __future__ import annotations

import heapq
import os
import pickle
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Optional

from wikitalk.ingest import RevisionRecord

DEFAULT_MAX_IN_MEMORY = 100_000
DEFAULT_STAGE_SPAN_YEARS = 2
DEFAULT_MAX_SPILL_RUNS = 64


class SpillDirectoryError(Exception):
    pass


@dataclass
class SortBudget:
    max_in_memory_revisions: int = DEFAULT_MAX_IN_MEMORY
    spill_directory: Optional[Path] = None
    stage_span_years: int = DEFAULT_STAGE_SPAN_YEARS
    max_spill_runs: int = DEFAULT_MAX_SPILL_RUNS

    def __post_init__(self):
        if self.max_in_memory_revisions < 2:
            raise ValueError("max_in_memory_revisions must be >= 2")
        if self.stage_span_years < 1:
            raise ValueError("stage_span_years must be >= 1")
        if self.spill_directory is not None:
            self.spill_directory = Path(self.spill_directory)


@dataclass
class SortStats:
    records: int = 0
    runs_spilled: int = 0
    stages: int = 0
    peak_in_memory_records: int = 0

    def _track(self, resident: int) -> None:
        if resident > self.peak_in_memory_records:
            self.peak_in_memory_records = resident


def ensure_spill_directory(budget: SortBudget) -> Path:
    """Validate (and create) the spill directory; fatal if unwritable."""
    directory = budget.spill_directory or Path(tempfile.gettempdir())
    try:
        directory.mkdir(parents=True, exist_ok=True)
        probe = tempfile.NamedTemporaryFile(dir=directory, prefix="wikitalk-probe-", delete=True)
        probe.close()
    except OSError as exc:
        raise SpillDirectoryError(f"spill directory {directory} is not writable: {exc}") from exc
    return directory


def _write_run(records: list[RevisionRecord], directory: Path) -> Path:
    records.sort(key=lambda r: r.sort_key)
    fd, name = tempfile.mkstemp(dir=directory, prefix="wikitalk-run-", suffix=".bin")
    with os.fdopen(fd, "wb") as fh:
        pickler = pickle.Pickler(fh, protocol=pickle.HIGHEST_PROTOCOL)
        for rec in records:
            pickler.dump(rec)
    return Path(name)


def _read_run(path: Path) -> Iterator[RevisionRecord]:
    with open(path, "rb") as fh:
        unpickler = pickle.Unpickler(fh)
        while True:
            try:
                yield unpickler.load()
            except EOFError:
                return


def _stage_start(ts: datetime, span_years: int) -> datetime:
    year = ts.year - (ts.year % span_years)
    return datetime(year, 1, 1, tzinfo=timezone.utc)


def sort_revisions(
    revisions: Iterable[RevisionRecord],
    budget: SortBudget,
    stats: Optional[SortStats] = None,
) -> Iterator[RevisionRecord]:
    """Yield one page's revisions in ascending (timestamp, revision_id) order.

    Spill files are private to this call and removed once fully merged.
    The spill directory is validated before any input is consumed.
    """
    stats = stats if stats is not None else SortStats()
    directory = ensure_spill_directory(budget)
    limit = budget.max_in_memory_revisions

    buffer: list[RevisionRecord] = []
    run_paths: list[Path] = []
    try:
        for rec in revisions:
            stats.records += 1
            buffer.append(rec)
            stats._track(len(buffer))
            if len(buffer) >= limit:
                run_paths.append(_write_run(buffer, directory))
                stats.runs_spilled += 1
                buffer = []
        if not run_paths:
            buffer.sort(key=lambda r: r.sort_key)
            yield from buffer
            return
        if buffer:
            run_paths.append(_write_run(buffer, directory))
            stats.runs_spilled += 1
            buffer = []
        if len(run_paths) > budget.max_spill_runs:
            yield from _sort_in_stages(run_paths, budget, directory, stats)
        else:
            stats._track(len(run_paths) + 1)
            yield from heapq.merge(
                *(_read_run(p) for p in run_paths), key=lambda r: r.sort_key
            )
    finally:
        for path in run_paths:
            path.unlink(missing_ok=True)


def _sort_in_stages(
    run_paths: list[Path],
    budget: SortBudget,
    directory: Path,
    stats: SortStats,
) -> Iterator[RevisionRecord]:
    """Repartition spilled records into calendar windows, then sort each.

    Stage boundaries respect the (timestamp, revision_id) order, so the
    concatenated stages equal a single global sort.
    """
    stage_files: dict[datetime, tuple[Path, pickle.Pickler]] = {}
    handles = {}
    for run in run_paths:
        for rec in _read_run(run):
            key = _stage_start(rec.timestamp, budget.stage_span_years)
            if key not in stage_files:
                fd, name = tempfile.mkstemp(dir=directory, prefix="wikitalk-stage-", suffix=".bin")
                fh = os.fdopen(fd, "wb")
                handles[key] = fh
                stage_files[key] = (Path(name), pickle.Pickler(fh, protocol=pickle.HIGHEST_PROTOCOL))
            stage_files[key][1].dump(rec)
    for fh in handles.values():
        fh.close()
    stats.stages = len(stage_files)
    try:
        for key in sorted(stage_files):
            path = stage_files[key][0]
            stage_budget = SortBudget(
                max_in_memory_revisions=budget.max_in_memory_revisions,
                spill_directory=directory,
                stage_span_years=budget.stage_span_years,
                max_spill_runs=10**9,
            )
            yield from sort_revisions(_read_run(path), stage_budget, SortStats())
    finally:
        for path, _ in stage_files.values():
            path.unlink(missing_ok=True)

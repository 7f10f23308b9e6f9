"""Snippet ingestion, batch execution and corpus statistics."""
from __future__ import annotations

import json
import logging
import multiprocessing
import os
import re
import time
from collections import Counter
from dataclasses import dataclass, field
from multiprocessing.connection import wait
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from . import codes
from .pipeline import (
    REPAIR_STAGES,
    STAGES,
    PipelineConfig,
    PipelineResult,
    StageSnapshot,
    incomplete_diagnostic,
    run,
)
from .source import Origin, Snippet, UsageError, normalize_newlines

log = logging.getLogger(__name__)

REPORT_SCHEMA = "ncc-report/1"
DIFF_SCHEMA = "ncc-diff/1"
JS_LANGUAGES = frozenset({"", "js", "javascript", "node"})
WATCHDOG_GRACE_SECS = 1.0

_FENCE_RE = re.compile(r"^( {0,3})(`{3,}|~{3,})(.*)$")


# -- ingestion -----------------------------------------------------------------------------


@dataclass(frozen=True)
class IngestRecord:
    id: str
    origin: Origin
    text: str

    def to_snippet(self) -> Snippet:
        return Snippet.from_text(self.text, id=self.id, origin=self.origin)


@dataclass
class InputFailure:
    source: str
    reason: str

    def to_dict(self) -> dict:
        return {"source": self.source, "reason": self.reason}


def extract_markdown(readme: str, package: str) -> list[IngestRecord]:
    """One record per JavaScript fenced code block, with ids ``<package>#<n>``."""
    records: list[IngestRecord] = []
    lines = normalize_newlines(readme).split("\n")
    i = 0
    while i < len(lines):
        m = _FENCE_RE.match(lines[i])
        if not m or (m.group(2)[0] == "`" and "`" in m.group(3)):
            i += 1
            continue
        indent, fence, info = len(m.group(1)), m.group(2), m.group(3).strip()
        language = info.split()[0].lower() if info else ""
        body: list[str] = []
        j = i + 1
        closed = False
        while j < len(lines):
            close = _FENCE_RE.match(lines[j])
            if close and close.group(2)[0] == fence[0] and len(close.group(2)) >= len(fence) \
                    and not close.group(3).strip():
                closed = True
                break
            line = lines[j]
            strip = min(indent, len(line) - len(line.lstrip(" ")))
            body.append(line[strip:])
            j += 1
        if not closed:
            log.info("%s: unclosed code fence at line %d dropped", package, i + 1)
            break
        text = "\n".join(body)
        if language in JS_LANGUAGES and text.strip():
            records.append(IngestRecord(
                f"{package}#{len(records) + 1}", Origin("markdown-readme", package), text,
            ))
        i = j + 1
    return records


def _read_text(path: Path) -> str:
    return path.read_bytes().decode("utf-8")


def load_inputs(path, extract: bool = False) -> tuple[list[IngestRecord], list[InputFailure]]:
    """Read snippets from a .js file or directory, a JSON Lines file, or README files.

    With ``extract`` the path (file or directory) holds markdown whose fenced
    JavaScript blocks become snippets; the package name is the README's
    parent directory name, or the file stem for other markdown files.
    """
    root = Path(path)
    records: list[IngestRecord] = []
    failures: list[InputFailure] = []
    if not root.exists():
        return [], [InputFailure(str(root), "no such file or directory")]
    if root.is_file() and root.suffix in (".jsonl", ".ndjson"):
        return _load_jsonl(root)
    if extract:
        files = [root] if root.is_file() else sorted(p for p in root.rglob("*.md") if p.is_file())
        for md in files:
            package = md.resolve().parent.name if md.stem.lower() == "readme" else md.stem
            try:
                records.extend(extract_markdown(_read_text(md), package))
            except (OSError, UnicodeDecodeError) as exc:
                failures.append(InputFailure(str(md), str(exc)))
        return records, failures
    files = [root] if root.is_file() else sorted(p for p in root.rglob("*.js") if p.is_file())
    for js in files:
        snippet_id = js.name if js == root else js.relative_to(root).as_posix()
        try:
            text = _read_text(js)
        except (OSError, UnicodeDecodeError) as exc:
            failures.append(InputFailure(str(js), str(exc)))
            continue
        records.append(IngestRecord(snippet_id, Origin("file", str(js)), text))
    return records, failures


def _load_jsonl(path: Path) -> tuple[list[IngestRecord], list[InputFailure]]:
    records: list[IngestRecord] = []
    failures: list[InputFailure] = []
    try:
        content = _read_text(path)
    except (OSError, UnicodeDecodeError) as exc:
        return [], [InputFailure(str(path), str(exc))]
    for n, line in enumerate(content.splitlines(), 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            records.append(IngestRecord(str(data["id"]), Origin.from_dict(data.get("origin")), data["text"]))
        except (ValueError, KeyError, TypeError) as exc:
            failures.append(InputFailure(f"{path}:{n}", f"bad record: {exc}"))
    return records, failures


def check_unique_ids(records: Sequence[IngestRecord]) -> None:
    seen = Counter(r.id for r in records)
    dupes = sorted(k for k, v in seen.items() if v > 1)
    if dupes:
        raise UsageError(f"duplicate snippet ids: {', '.join(dupes[:5])}")


# -- execution -------------------------------------------------------------------------------


def _child_main(conn, snippet: Snippet, config: PipelineConfig) -> None:
    try:
        result = run(snippet, config, on_snapshot=lambda s: conn.send(("snapshot", s.to_dict())))
        conn.send(("result", result.to_dict()))
    finally:
        conn.close()


def _killed_result(snippet: Snippet, snapshots: list[StageSnapshot], reason: str, timed_out: bool) -> PipelineResult:
    """Result for a worker that never reported back: keep what it streamed."""
    if not snapshots:
        snapshots = [StageSnapshot("initial", snippet.text, [incomplete_diagnostic(snippet, reason)])]
    while len(snapshots) < len(STAGES):
        snapshots.append(snapshots[-1].copy_as(STAGES[len(snapshots)]))
    return PipelineResult(
        snippet_id=snippet.id,
        origin=snippet.origin,
        input_text=snippet.text,
        snapshots=snapshots,
        timed_out=timed_out,
        analyzer_abort=not timed_out,
        lines_total=snippet.line_count,
        error=None if timed_out else reason,
    )


@dataclass
class _Job:
    snippet: Snippet
    process: multiprocessing.Process
    conn: object
    kill_at: float
    snapshots: list[StageSnapshot] = field(default_factory=list)


def _run_isolated(
    snippets: Sequence[Snippet], config: PipelineConfig, parallelism: int,
    progress: Optional[Callable[[PipelineResult], None]],
) -> list[PipelineResult]:
    ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn")
    pending = list(reversed(snippets))
    active: dict[object, _Job] = {}
    results: list[PipelineResult] = []

    def finish(job: _Job, result: PipelineResult) -> None:
        job.process.join(timeout=1.0)
        if job.process.is_alive():
            job.process.kill()
            job.process.join()
        job.conn.close()
        results.append(result)
        if progress is not None:
            progress(result)

    while pending or active:
        while pending and len(active) < parallelism:
            snippet = pending.pop()
            parent_conn, child_conn = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_child_main, args=(child_conn, snippet, config), daemon=True)
            proc.start()
            child_conn.close()
            kill_at = time.monotonic() + config.timeout_secs + WATCHDOG_GRACE_SECS
            active[parent_conn] = _Job(snippet, proc, parent_conn, kill_at)
        now = time.monotonic()
        timeout = max(0.0, min(job.kill_at for job in active.values()) - now)
        for conn in wait(list(active), timeout=timeout):
            job = active[conn]
            try:
                kind, payload = conn.recv()
            except (EOFError, OSError):
                del active[conn]
                finish(job, _killed_result(job.snippet, job.snapshots, "worker exited unexpectedly", False))
                continue
            if kind == "snapshot":
                job.snapshots.append(StageSnapshot.from_dict(payload))
            else:
                del active[conn]
                finish(job, PipelineResult.from_dict(payload))
        now = time.monotonic()
        for conn, job in list(active.items()):
            if now >= job.kill_at:
                job.process.kill()
                del active[conn]
                log.warning("%s: killed after %.1fs", job.snippet.id, config.timeout_secs + WATCHDOG_GRACE_SECS)
                finish(job, _killed_result(job.snippet, job.snapshots, "timeout", True))
    return results


def run_corpus(
    records: Iterable[IngestRecord],
    config: PipelineConfig = PipelineConfig(),
    parallelism: int = 1,
    *,
    isolate: bool = True,
    failures: Sequence[InputFailure] = (),
    progress: Optional[Callable[[PipelineResult], None]] = None,
) -> tuple["CorpusReport", list[PipelineResult]]:
    """Run the pipeline over every record; results come back sorted by snippet id.

    With ``isolate`` each snippet runs in its own worker process under a
    watchdog, at most ``parallelism`` at a time, so a hung analysis cannot
    stall the run.
    """
    if parallelism < 1:
        raise UsageError("parallelism must be at least 1")
    records = list(records)
    check_unique_ids(records)
    snippets = [r.to_snippet() for r in records]
    if isolate and snippets:
        results = _run_isolated(snippets, config, parallelism, progress)
    else:
        results = []
        for snippet in snippets:
            results.append(run(snippet, config))
            if progress is not None:
                progress(results[-1])
    results.sort(key=lambda r: r.snippet_id)
    return build_report(results, failures), results


def write_results(results: Iterable[PipelineResult], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for result in results:
            fh.write(json.dumps(result.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")


def read_results(path) -> list[PipelineResult]:
    with open(path, encoding="utf-8") as fh:
        return [PipelineResult.from_dict(json.loads(line)) for line in fh if line.strip()]


# -- statistics -------------------------------------------------------------------------------


@dataclass
class StageStats:
    error_free_count: int
    erroneous_count: int
    total_errors: int
    avg_errors_per_snippet: float
    avg_errors_per_erroneous_snippet: float
    histogram: list[tuple[int, int, str]]  # (code, count, label), most frequent first

    def counts(self) -> dict[int, int]:
        return {code: count for code, count, _ in self.histogram}

    def to_dict(self) -> dict:
        return {
            "error_free_count": self.error_free_count,
            "erroneous_count": self.erroneous_count,
            "total_errors": self.total_errors,
            "avg_errors_per_snippet": self.avg_errors_per_snippet,
            "avg_errors_per_erroneous_snippet": self.avg_errors_per_erroneous_snippet,
            "histogram": [{"code": c, "count": n, "label": lbl} for c, n, lbl in self.histogram],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StageStats":
        return cls(
            error_free_count=int(data["error_free_count"]),
            erroneous_count=int(data["erroneous_count"]),
            total_errors=int(data["total_errors"]),
            avg_errors_per_snippet=float(data["avg_errors_per_snippet"]),
            avg_errors_per_erroneous_snippet=float(data["avg_errors_per_erroneous_snippet"]),
            histogram=[(int(h["code"]), int(h["count"]), h["label"]) for h in data["histogram"]],
        )


def stage_stats(snapshots: Sequence[StageSnapshot]) -> StageStats:
    counter: Counter[int] = Counter()
    erroneous = 0
    for snap in snapshots:
        counter.update(d.code for d in snap.diagnostics)
        erroneous += bool(snap.diagnostics)
    total = sum(counter.values())
    n = len(snapshots)
    histogram = sorted(((c, k, codes.label(c)) for c, k in counter.items()), key=lambda h: (-h[1], h[0]))
    return StageStats(
        error_free_count=n - erroneous,
        erroneous_count=erroneous,
        total_errors=total,
        avg_errors_per_snippet=total / n if n else 0.0,
        avg_errors_per_erroneous_snippet=total / erroneous if erroneous else 0.0,
        histogram=histogram,
    )


@dataclass
class CorpusReport:
    snippet_count: int
    stages: dict[str, StageStats]
    emptied_count: int = 0
    lines_total: int = 0
    lines_commented: int = 0
    timed_out_count: int = 0
    analyzer_abort_count: int = 0
    failures: list[InputFailure] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "snippet_count": self.snippet_count,
            "stages": {name: stats.to_dict() for name, stats in self.stages.items()},
            "emptied_count": self.emptied_count,
            "lines_total": self.lines_total,
            "lines_commented": self.lines_commented,
            "timed_out_count": self.timed_out_count,
            "analyzer_abort_count": self.analyzer_abort_count,
            "failures": [f.to_dict() for f in self.failures],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusReport":
        if data.get("schema") != REPORT_SCHEMA:
            raise UsageError(f"not a {REPORT_SCHEMA} document (schema={data.get('schema')!r})")
        return cls(
            snippet_count=int(data["snippet_count"]),
            stages={name: StageStats.from_dict(s) for name, s in data["stages"].items()},
            emptied_count=int(data.get("emptied_count", 0)),
            lines_total=int(data.get("lines_total", 0)),
            lines_commented=int(data.get("lines_commented", 0)),
            timed_out_count=int(data.get("timed_out_count", 0)),
            analyzer_abort_count=int(data.get("analyzer_abort_count", 0)),
            failures=[InputFailure(f["source"], f["reason"]) for f in data.get("failures", [])],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def render(self, top: int = 10) -> str:
        return render_report(self, top)


def build_report(results: Sequence[PipelineResult], failures: Sequence[InputFailure] = ()) -> CorpusReport:
    stages = {name: stage_stats([r.snapshot(name) for r in results]) for name in STAGES}
    return CorpusReport(
        snippet_count=len(results),
        stages=stages,
        emptied_count=sum(r.emptied for r in results),
        lines_total=sum(r.lines_total for r in results),
        lines_commented=sum(r.lines_commented for r in results),
        timed_out_count=sum(r.timed_out for r in results),
        analyzer_abort_count=sum(r.analyzer_abort for r in results),
        failures=list(failures),
    )


def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for n, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(row, widths))))
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _pct(part: int, whole: int) -> str:
    return f"{100.0 * part / whole:.1f}%" if whole else "n/a"


def render_report(report: CorpusReport, top: int = 10) -> str:
    n = report.snippet_count
    rows = []
    for name, stats in report.stages.items():
        rows.append([
            name, stats.error_free_count, _pct(stats.error_free_count, n), stats.total_errors,
            f"{stats.avg_errors_per_snippet:.2f}", f"{stats.avg_errors_per_erroneous_snippet:.2f}",
        ])
    parts = [
        f"snippets: {n}",
        _table(["stage", "error-free", "rate", "errors", "avg/snippet", "avg/erroneous"], rows),
        "",
        f"emptied: {report.emptied_count} ({_pct(report.emptied_count, n)})  "
        f"lines commented: {report.lines_commented} of {report.lines_total}  "
        f"timed out: {report.timed_out_count}  aborted: {report.analyzer_abort_count}",
    ]
    for name, stats in report.stages.items():
        if stats.histogram:
            parts.append("")
            parts.append(f"top {top} errors after {name}:")
            parts.append(_table(["code", "label", "count"],
                                [[c, lbl, k] for c, k, lbl in stats.histogram[:top]]))
    if report.failures:
        parts.append("")
        parts.append(f"input failures: {len(report.failures)}")
        parts.extend(f"  {f.source}: {f.reason}" for f in report.failures)
    return "\n".join(parts)


# -- comparisons -------------------------------------------------------------------------------


@dataclass
class ReportDiff:
    before_stage: str
    after_stage: str
    snippet_count: int
    code_deltas: list[dict]
    total_errors: tuple[int, int]
    error_free: tuple[int, int]
    avg_errors_per_snippet: tuple[float, float]
    emptied: tuple[int, int]

    @property
    def total_delta(self) -> int:
        return self.total_errors[1] - self.total_errors[0]

    def to_dict(self) -> dict:
        def pair(values):
            return {"before": values[0], "after": values[1], "delta": values[1] - values[0]}

        n = self.snippet_count
        return {
            "schema": DIFF_SCHEMA,
            "before_stage": self.before_stage,
            "after_stage": self.after_stage,
            "snippet_count": n,
            "codes": self.code_deltas,
            "total_errors": pair(self.total_errors),
            "error_free_count": pair(self.error_free),
            "error_free_rate": pair(tuple(v / n if n else 0.0 for v in self.error_free)),
            "avg_errors_per_snippet": pair(self.avg_errors_per_snippet),
            "emptied_count": pair(self.emptied),
        }

    def render(self) -> str:
        rows = [[d["code"], d["label"], d["before"], d["after"], f"{d['delta']:+d}"] for d in self.code_deltas]
        rows.append(["", "total", self.total_errors[0], self.total_errors[1], f"{self.total_delta:+d}"])
        n = self.snippet_count
        return "\n".join([
            f"{self.before_stage} -> {self.after_stage} ({n} snippets)",
            _table(["code", "label", "before", "after", "delta"], rows),
            "",
            f"error-free: {self.error_free[0]} -> {self.error_free[1]} "
            f"({_pct(self.error_free[0], n)} -> {_pct(self.error_free[1], n)})",
        ])


def diff_report(
    before: CorpusReport,
    after: CorpusReport,
    before_stage: str = "deletion",
    after_stage: str = "deletion",
) -> ReportDiff:
    """Per-code and aggregate deltas between one stage of ``before`` and one of ``after``."""
    if before.snippet_count != after.snippet_count:
        raise UsageError(f"snippet counts differ: {before.snippet_count} vs {after.snippet_count}")
    for report, stage in ((before, before_stage), (after, after_stage)):
        if stage not in report.stages:
            raise UsageError(f"unknown stage {stage!r}")
    a, b = before.stages[before_stage], after.stages[after_stage]
    counts_a, counts_b = a.counts(), b.counts()
    labels = {c: lbl for c, _, lbl in a.histogram + b.histogram}
    deltas = [
        {"code": c, "label": labels[c], "before": counts_a.get(c, 0), "after": counts_b.get(c, 0),
         "delta": counts_b.get(c, 0) - counts_a.get(c, 0)}
        for c in set(counts_a) | set(counts_b)
    ]
    deltas.sort(key=lambda d: (d["delta"], d["code"]))
    emptied_before = before.emptied_count if before_stage == "deletion" else 0
    emptied_after = after.emptied_count if after_stage == "deletion" else 0
    return ReportDiff(
        before_stage=before_stage,
        after_stage=after_stage,
        snippet_count=before.snippet_count,
        code_deltas=deltas,
        total_errors=(a.total_errors, b.total_errors),
        error_free=(a.error_free_count, b.error_free_count),
        avg_errors_per_snippet=(a.avg_errors_per_snippet, b.avg_errors_per_snippet),
        emptied=(emptied_before, emptied_after),
    )


def load_report(path) -> CorpusReport:
    with open(path, encoding="utf-8") as fh:
        return CorpusReport.from_dict(json.load(fh))


def safe_filename(snippet_id: str) -> str:
    name = re.sub(r"[^A-Za-z0-9._-]+", "_", snippet_id).strip("._") or "snippet"
    return name if name.endswith(".js") else name + ".js"


def default_parallelism() -> int:
    return max(1, os.cpu_count() or 1)


__all__ = [
    "CorpusReport",
    "IngestRecord",
    "InputFailure",
    "REPAIR_STAGES",
    "ReportDiff",
    "StageStats",
    "build_report",
    "diff_report",
    "extract_markdown",
    "load_inputs",
    "load_report",
    "read_results",
    "render_report",
    "run_corpus",
    "write_results",
]

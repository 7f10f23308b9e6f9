"""Per-snippet orchestration: check, targeted fixes, codefixes, line deletion."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from . import codes
from .analyzer import AmbientEnvironment, AnalysisTimeout, CheckResult, check, default_environment
from .deletion import DeletionBudget, delete_lines
from .fixes import FixStyle, run_codefixes, targeted_fixes
from .source import Diagnostic, Origin, Snippet

log = logging.getLogger(__name__)

STAGES = ("initial", "targeted", "codefix", "deletion")
REPAIR_STAGES = STAGES[1:]
RESULT_SCHEMA = "ncc-result/1"


@dataclass(frozen=True)
class PipelineConfig:
    timeout_secs: float = 60.0
    max_compiles: int = 500
    stages: frozenset[str] = frozenset(REPAIR_STAGES)
    style: FixStyle = FixStyle()
    suppress_missing_module: bool = True
    ambient_path: Optional[str] = None

    def __post_init__(self):
        if not self.timeout_secs > 0:
            raise ValueError("timeout_secs must be positive")
        if self.max_compiles <= 0:
            raise ValueError("max_compiles must be positive")
        unknown = set(self.stages) - set(REPAIR_STAGES)
        if unknown:
            raise ValueError(f"unknown stages: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "stages", frozenset(self.stages))

    def measure_only(self) -> "PipelineConfig":
        return replace(self, stages=frozenset())

    def environment(self) -> AmbientEnvironment:
        return AmbientEnvironment.load(self.ambient_path)


@dataclass
class StageSnapshot:
    stage: str
    text: str
    diagnostics: list[Diagnostic]
    changes: list[dict] = field(default_factory=list)
    skipped: bool = False
    elapsed_ms: float = 0.0
    compile_count: int = 0

    @property
    def error_count(self) -> int:
        return len(self.diagnostics)

    def copy_as(self, stage: str) -> "StageSnapshot":
        return StageSnapshot(stage, self.text, list(self.diagnostics), skipped=True)

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "text": self.text,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "changes": self.changes,
            "skipped": self.skipped,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "compile_count": self.compile_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StageSnapshot":
        return cls(
            stage=data["stage"],
            text=data["text"],
            diagnostics=[Diagnostic.from_dict(d) for d in data.get("diagnostics", [])],
            changes=list(data.get("changes", [])),
            skipped=bool(data.get("skipped", False)),
            elapsed_ms=float(data.get("elapsed_ms", 0.0)),
            compile_count=int(data.get("compile_count", 0)),
        )


@dataclass
class PipelineResult:
    snippet_id: str
    origin: Origin
    input_text: str
    snapshots: list[StageSnapshot]
    emptied: bool = False
    timed_out: bool = False
    analyzer_abort: bool = False
    lines_total: int = 0
    lines_commented: int = 0
    error: Optional[str] = None

    @property
    def final(self) -> StageSnapshot:
        return self.snapshots[-1]

    @property
    def final_text(self) -> str:
        return self.final.text

    @property
    def final_diagnostics(self) -> list[Diagnostic]:
        return self.final.diagnostics

    @property
    def changed(self) -> bool:
        return self.final_text != self.input_text

    def snapshot(self, stage: str) -> StageSnapshot:
        for snap in self.snapshots:
            if snap.stage == stage:
                return snap
        raise KeyError(stage)

    @property
    def timings(self) -> dict[str, float]:
        return {s.stage: s.elapsed_ms for s in self.snapshots}

    def to_dict(self) -> dict:
        return {
            "schema": RESULT_SCHEMA,
            "id": self.snippet_id,
            "origin": self.origin.to_dict(),
            "input_text": self.input_text,
            "final_text": self.final_text,
            "final_diagnostics": [d.to_dict() for d in self.final_diagnostics],
            "flags": {"emptied": self.emptied, "timed_out": self.timed_out, "analyzer_abort": self.analyzer_abort},
            "lines_total": self.lines_total,
            "lines_commented": self.lines_commented,
            "timings_ms": {k: round(v, 3) for k, v in self.timings.items()},
            "stages": [s.to_dict() for s in self.snapshots],
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineResult":
        if data.get("schema", RESULT_SCHEMA) != RESULT_SCHEMA:
            raise ValueError(f"unsupported result schema {data.get('schema')!r}")
        flags = data.get("flags", {})
        return cls(
            snippet_id=data["id"],
            origin=Origin.from_dict(data.get("origin")),
            input_text=data.get("input_text", ""),
            snapshots=[StageSnapshot.from_dict(s) for s in data["stages"]],
            emptied=bool(flags.get("emptied")),
            timed_out=bool(flags.get("timed_out")),
            analyzer_abort=bool(flags.get("analyzer_abort")),
            lines_total=int(data.get("lines_total", 0)),
            lines_commented=int(data.get("lines_commented", 0)),
            error=data.get("error"),
        )


SnapshotCallback = Callable[[StageSnapshot], None]


def incomplete_diagnostic(snippet: Snippet, reason: str) -> Diagnostic:
    return codes.make_diagnostic(codes.ANALYSIS_INCOMPLETE, 0, 0, snippet, reason)


def run(
    snippet: Snippet,
    config: PipelineConfig = PipelineConfig(),
    env: Optional[AmbientEnvironment] = None,
    on_snapshot: Optional[SnapshotCallback] = None,
) -> PipelineResult:
    """Run every enabled stage on ``snippet`` within ``config.timeout_secs``.

    Four snapshots are always recorded; a stage that does not run is recorded
    as a skipped copy of the previous snapshot.
    """
    env = env or (default_environment() if config.ambient_path is None else config.environment())
    started = time.monotonic()
    deadline = started + config.timeout_secs

    def check_fn(s: Snippet) -> CheckResult:
        return check(s, env, deadline, suppress_missing_module=config.suppress_missing_module)

    result = PipelineResult(
        snippet_id=snippet.id,
        origin=snippet.origin,
        input_text=snippet.text,
        snapshots=[],
        lines_total=snippet.line_count,
    )

    def record(snap: StageSnapshot) -> None:
        result.snapshots.append(snap)
        if on_snapshot is not None:
            on_snapshot(snap)

    def fail(exc: BaseException) -> str:
        if isinstance(exc, AnalysisTimeout):
            result.timed_out = True
            return "timeout"
        result.analyzer_abort = True
        result.error = f"{type(exc).__name__}: {exc}"
        log.warning("analysis of %s aborted: %s", snippet.id, result.error)
        return "analyzer error"

    t0 = time.monotonic()
    try:
        current: Optional[CheckResult] = check_fn(snippet)
        record(StageSnapshot("initial", snippet.text, list(current.diagnostics), elapsed_ms=_ms(t0), compile_count=1))
    except Exception as exc:  # containment boundary: the snippet gets a synthetic diagnostic
        reason = fail(exc)
        current = None
        record(StageSnapshot("initial", snippet.text, [incomplete_diagnostic(snippet, reason)],
                             elapsed_ms=_ms(t0), compile_count=1))

    for stage in REPAIR_STAGES:
        previous = result.snapshots[-1]
        if current is None or stage not in config.stages or not current.diagnostics:
            record(previous.copy_as(stage))
            continue
        t0 = time.monotonic()
        try:
            current, snap = _run_stage(stage, current, check_fn, config, deadline, result)
            snap.elapsed_ms = _ms(t0)
            record(snap)
        except Exception as exc:  # containment boundary: keep the last good snapshot
            fail(exc)
            current = None
            skipped = previous.copy_as(stage)
            skipped.elapsed_ms = _ms(t0)
            record(skipped)
    return result


def _run_stage(stage, current: CheckResult, check_fn, config: PipelineConfig, deadline: float, result):
    if stage == "targeted":
        outcome = targeted_fixes(current.snippet, check_fn=check_fn, style=config.style, initial=current)
        snap = StageSnapshot(stage, outcome.text_after, outcome.diagnostics_after,
                             changes=[a.to_dict() for a in outcome.applied], compile_count=outcome.compile_count)
        return outcome.result, snap
    if stage == "codefix":
        outcome = run_codefixes(current, check_fn)
        snap = StageSnapshot(stage, outcome.text_after, outcome.diagnostics_after,
                             changes=[a.to_dict() for a in outcome.applied], compile_count=outcome.compile_count)
        return outcome.result, snap
    remaining = max(deadline - time.monotonic(), 1e-3)
    budget = DeletionBudget(max_compiles=config.max_compiles, max_seconds=remaining)
    deleted = delete_lines(current.snippet, check_fn, budget, initial=current)
    if deleted.timed_out:
        result.timed_out = True
    result.lines_commented = deleted.lines_commented
    result.emptied = deleted.emptied
    snap = StageSnapshot(stage, deleted.text, deleted.diagnostics,
                         changes=[{"comment_out_line": line} for line in deleted.commented],
                         compile_count=deleted.compile_count)
    return deleted.result, snap


def _ms(t0: float) -> float:
    return (time.monotonic() - t0) * 1000.0


def run_twice_fixed_point(
    snippet: Snippet, config: PipelineConfig = PipelineConfig(), env: Optional[AmbientEnvironment] = None
) -> bool:
    """True when running the pipeline on its own output changes nothing."""
    first = run(snippet, config, env)
    second = run(snippet.with_text(first.final_text), config, env)
    return not second.changed

"""Diagnostic-guided line deletion.

Lines are "deleted" by prefixing them with ``//``.  The search is greedy: try
the line of the current diagnostic, keep the edit when the diagnostic count
does not grow (ties included) and restart from the first diagnostic,
otherwise move on to the next diagnostic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .analyzer import AnalysisTimeout, CheckResult
from .source import OUT_OF_RANGE, Diagnostic, Snippet, comment_out_line, is_commented_line, line_of

CheckFn = Callable[[Snippet], CheckResult]


@dataclass(frozen=True)
class DeletionBudget:
    max_compiles: int = 500
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_compiles <= 0 or self.max_seconds <= 0:
            raise ValueError("deletion budget must be positive")


@dataclass
class DeletionState:
    best: CheckResult
    current: CheckResult
    error_no: int = 0
    done: bool = False
    compile_count: int = 0


@dataclass
class DeletionResult:
    text: str
    diagnostics: list[Diagnostic]
    lines_commented: int
    emptied: bool
    compile_count: int
    budget_exhausted: bool = False
    timed_out: bool = False
    out_of_range: bool = False
    commented: list[int] = field(default_factory=list)
    result: Optional[CheckResult] = field(default=None, repr=False)


def is_emptied(text: str) -> bool:
    """True when at least one line is non-blank and every non-blank line is a comment."""
    lines = [line for line in text.split("\n") if line.strip()]
    return bool(lines) and all(is_commented_line(line) for line in lines)


def delete_lines(
    snippet: Snippet,
    check: CheckFn,
    budget: DeletionBudget = DeletionBudget(),
    initial: Optional[CheckResult] = None,
) -> DeletionResult:
    """Comment out diagnostic lines while the diagnostic count does not increase.

    ``initial`` may carry an existing check of ``snippet`` to save one compile.
    Stops early, keeping the best state so far, when the compile or time
    budget runs out or when a diagnostic points past the end of the text.
    """
    started = time.monotonic()
    compiles = 0
    if initial is None:
        initial = check(snippet)
        compiles = 1
    state = DeletionState(best=initial, current=initial, compile_count=compiles)
    visited = {initial.snippet.text}
    commented: list[int] = []
    exhausted = out_of_range = timed_out = False

    while not state.done:
        state.current = state.best
        diagnostics = state.best.diagnostics
        if state.error_no >= len(diagnostics):
            state.done = True
            continue
        target = diagnostics[state.error_no]
        line = line_of(target.span, state.best.snippet)
        if line is OUT_OF_RANGE:
            out_of_range = True
            break
        if is_commented_line(state.best.snippet.lines[line - 1]):
            state.error_no += 1
            continue
        if state.compile_count >= budget.max_compiles:
            exhausted = True
            break
        if time.monotonic() - started >= budget.max_seconds:
            exhausted = timed_out = True
            break
        candidate = comment_out_line(state.best.snippet, line)
        if candidate.text in visited:
            state.error_no += 1
            continue
        try:
            state.current = check(candidate)
        except AnalysisTimeout:
            exhausted = timed_out = True
            break
        state.compile_count += 1
        if state.current.count <= state.best.count:
            state.best = state.current
            visited.add(candidate.text)
            commented.append(line)
            state.error_no = 0
        else:
            state.error_no += 1

    best = state.best
    return DeletionResult(
        text=best.snippet.text,
        diagnostics=list(best.diagnostics),
        lines_commented=len(commented),
        emptied=bool(commented) and is_emptied(best.snippet.text),
        compile_count=state.compile_count,
        budget_exhausted=exhausted,
        timed_out=timed_out,
        out_of_range=out_of_range,
        commented=commented,
        result=best,
    )

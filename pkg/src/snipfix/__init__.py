"""Detect and repair errors in fragmentary Node.js code snippets."""
from __future__ import annotations

from .analyzer import AmbientEnvironment, CheckResult, TypeHint, check, expected_type_at, name_suggestion
from .corpus import CorpusReport, build_report, diff_report, extract_markdown, run_corpus
from .deletion import DeletionBudget, delete_lines
from .fixes import FixStyle, apply_batch, codefixes_for, register_codefix, targeted_fixes
from .parser import SyntaxTree, parse
from .pipeline import PipelineConfig, PipelineResult, run, run_twice_fixed_point
from .source import Diagnostic, FixAction, Origin, Snippet, Span, TextChange, UsageError

__version__ = "0.1.0"

__all__ = [
    "AmbientEnvironment",
    "CheckResult",
    "CorpusReport",
    "DeletionBudget",
    "Diagnostic",
    "FixAction",
    "FixStyle",
    "Origin",
    "PipelineConfig",
    "PipelineResult",
    "Snippet",
    "Span",
    "SyntaxTree",
    "TextChange",
    "TypeHint",
    "UsageError",
    "apply_batch",
    "build_report",
    "check",
    "codefixes_for",
    "delete_lines",
    "diff_report",
    "expected_type_at",
    "extract_markdown",
    "name_suggestion",
    "parse",
    "register_codefix",
    "run",
    "run_corpus",
    "run_twice_fixed_point",
    "targeted_fixes",
]

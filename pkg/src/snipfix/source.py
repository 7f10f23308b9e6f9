"""Core value types: snippets, spans, diagnostics and edits.

All offsets are byte offsets into the UTF-8 encoding of the snippet text.
Lines are 1-based.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Union


class UsageError(ValueError):
    """Raised when an operation is called with arguments outside its contract."""


class OutOfRange:
    """Marker returned by :func:`line_of` for spans past the end of the text."""

    _instance: "OutOfRange | None" = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OUT_OF_RANGE"

    def __bool__(self) -> bool:
        return False


OUT_OF_RANGE = OutOfRange()


class LineRecord(NamedTuple):
    number: int
    start: int
    length: int


def normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n")


def build_line_index(text: str) -> list[LineRecord]:
    """Split ``text`` into 1-based line records (byte offsets, newline excluded)."""
    data = text.encode("utf-8")
    records = []
    start = 0
    number = 1
    while True:
        nl = data.find(b"\n", start)
        if nl < 0:
            records.append(LineRecord(number, start, len(data) - start))
            return records
        records.append(LineRecord(number, start, nl - start))
        start = nl + 1
        number += 1


@dataclass(frozen=True, slots=True)
class Span:
    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 0:
            raise UsageError(f"negative span {self.start},{self.length}")

    @property
    def end(self) -> int:
        return self.start + self.length

    def in_range(self, text_or_size: Union[str, int]) -> bool:
        size = text_or_size if isinstance(text_or_size, int) else byte_length(text_or_size)
        return self.end <= size

    def intersects(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def to_dict(self) -> dict:
        return {"start": self.start, "length": self.length}


def byte_length(text: str) -> int:
    return len(text) if text.isascii() else len(text.encode("utf-8"))


@dataclass(frozen=True, slots=True)
class Origin:
    kind: str = "inline"  # "markdown-readme" | "file" | "inline"
    detail: Optional[str] = None  # package name or path

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.detail is not None:
            out["detail"] = self.detail
        return out

    @classmethod
    def from_dict(cls, data) -> "Origin":
        if data is None:
            return cls()
        if isinstance(data, str):
            return cls(kind=data)
        return cls(kind=data.get("kind", "inline"), detail=data.get("detail"))


@dataclass(frozen=True)
class Snippet:
    id: str
    text: str
    origin: Origin = field(default_factory=Origin)

    @classmethod
    def from_text(cls, text: str, id: str = "<inline>", origin: Optional[Origin] = None) -> "Snippet":
        return cls(id=id, text=normalize_newlines(text), origin=origin or Origin())

    def with_text(self, text: str) -> "Snippet":
        return Snippet(id=self.id, text=text, origin=self.origin)

    @cached_property
    def line_index(self) -> list[LineRecord]:
        return build_line_index(self.text)

    @cached_property
    def _line_starts(self) -> list[int]:
        return [rec.start for rec in self.line_index]

    @cached_property
    def size(self) -> int:
        return byte_length(self.text)

    @property
    def line_count(self) -> int:
        return len(self.line_index)

    @cached_property
    def lines(self) -> list[str]:
        return self.text.split("\n")

    def line_at_offset(self, offset: int) -> int:
        """Line containing byte ``offset``; offsets at or past the end map to the last line."""
        return bisect.bisect_right(self._line_starts, offset)


def line_of(span: Span, snippet: Snippet) -> Union[int, OutOfRange]:
    if span.start >= snippet.size:
        return OUT_OF_RANGE
    return snippet.line_at_offset(span.start)


def is_commented_line(line: str) -> bool:
    return line.lstrip().startswith("//")


def comment_out_line(snippet: Snippet, line: int) -> Snippet:
    if not 1 <= line <= snippet.line_count:
        raise UsageError(f"line {line} outside 1..{snippet.line_count}")
    lines = list(snippet.lines)
    lines[line - 1] = "//" + lines[line - 1]
    return snippet.with_text("\n".join(lines))


class Category(str, Enum):
    SYNTAX = "syntax"
    SEMANTIC = "semantic"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    code: int
    category: Category
    message: str
    span: Span
    line: int

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.span.start, self.code)

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "category": self.category.value,
            "message": self.message,
            "start": self.span.start,
            "length": self.span.length,
            "line": self.line,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Diagnostic":
        return cls(
            code=int(data["code"]),
            category=Category(data["category"]),
            message=data["message"],
            span=Span(int(data["start"]), int(data["length"])),
            line=int(data["line"]),
        )


@dataclass(frozen=True, slots=True)
class TextChange:
    span: Span
    new_text: str

    def to_dict(self) -> dict:
        return {"start": self.span.start, "length": self.span.length, "new_text": self.new_text}

    @classmethod
    def from_dict(cls, data: dict) -> "TextChange":
        return cls(Span(int(data["start"]), int(data["length"])), data["new_text"])


@dataclass(frozen=True)
class FixAction:
    fix_id: str
    description: str
    changes: tuple[TextChange, ...]
    target_diagnostic: Diagnostic

    def __post_init__(self):
        if not self.changes:
            raise UsageError("a fix action needs at least one change")
        ordered = sorted(self.changes, key=lambda c: (c.span.start, c.span.length))
        for a, b in zip(ordered, ordered[1:]):
            if a.span.intersects(b.span) or (a.span.start == b.span.start):
                raise UsageError(f"overlapping changes in action {self.fix_id!r}")

    def to_dict(self) -> dict:
        return {
            "fix_id": self.fix_id,
            "description": self.description,
            "changes": [c.to_dict() for c in self.changes],
            "target": self.target_diagnostic.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FixAction":
        return cls(
            fix_id=data["fix_id"],
            description=data["description"],
            changes=tuple(TextChange.from_dict(c) for c in data["changes"]),
            target_diagnostic=Diagnostic.from_dict(data["target"]),
        )


def apply_changes(text: str, changes: Sequence[TextChange]) -> str:
    """Apply pairwise-disjoint changes back to front.

    Insertions at the same offset end up in the order they were given.
    """
    data = text.encode("utf-8")
    ordered = sorted(enumerate(changes), key=lambda item: (item[1].span.start, item[1].span.length, item[0]))
    for _, change in reversed(ordered):
        if change.span.end > len(data):
            raise UsageError(f"change span {change.span} outside text of {len(data)} bytes")
        data = data[: change.span.start] + change.new_text.encode("utf-8") + data[change.span.end :]
    return data.decode("utf-8")

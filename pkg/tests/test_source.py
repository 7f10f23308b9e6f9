from __future__ import annotations

import pytest

from conftest import known_text
from snipfix.source import (
    OUT_OF_RANGE,
    Category,
    Diagnostic,
    FixAction,
    Snippet,
    Span,
    TextChange,
    UsageError,
    apply_changes,
    build_line_index,
    byte_length,
    comment_out_line,
    is_commented_line,
    line_of,
)


def records(text):
    return [tuple(r) for r in build_line_index(text)]


def test_line_index_of_empty_text():
    assert records("") == [(1, 0, 0)]


def test_line_index_two_lines():
    assert records("a\nb") == [(1, 0, 1), (2, 2, 1)]


def test_line_index_of_http_snippet_has_eight_lines():
    assert len(build_line_index(known_text("http-get.js"))) == 8


def test_line_index_counts_bytes_not_characters():
    assert records("é\nx") == [(1, 0, 2), (2, 3, 1)]


def test_trailing_newline_yields_empty_last_line():
    assert records("a\n") == [(1, 0, 1), (2, 2, 0)]


def test_crlf_is_normalized():
    snippet = Snippet.from_text("a\r\nb\r\n")
    assert snippet.text == "a\nb\n"
    assert snippet.line_count == 3


@pytest.mark.parametrize("span, expected", [(Span(0, 1), 1), (Span(2, 1), 2), (Span(1, 0), 1)])
def test_line_of(span, expected):
    assert line_of(span, Snippet.from_text("a\nb")) == expected


def test_line_of_past_end_is_out_of_range():
    result = line_of(Span(99, 1), Snippet.from_text("a\nb"))
    assert result is OUT_OF_RANGE
    assert not result


def test_line_of_at_end_of_text_is_out_of_range():
    assert line_of(Span(3, 0), Snippet.from_text("a\nb")) is OUT_OF_RANGE


def test_span_rejects_negative_values():
    with pytest.raises(UsageError):
        Span(-1, 0)


def test_comment_out_single_line():
    assert comment_out_line(Snippet.from_text("};"), 1).text == "//};"


def test_comment_out_second_line():
    assert comment_out_line(Snippet.from_text("a\nb"), 2).text == "a\n//b"


def test_comment_out_is_a_plain_prefix_even_when_already_commented():
    assert comment_out_line(Snippet.from_text("//x"), 1).text == "////x"


@pytest.mark.parametrize("line", [0, 3, -1])
def test_comment_out_rejects_lines_outside_text(line):
    with pytest.raises(UsageError):
        comment_out_line(Snippet.from_text("a\nb"), line)


def test_comment_out_keeps_identity():
    snippet = Snippet.from_text("a\nb", id="x")
    assert comment_out_line(snippet, 1).id == "x"


@pytest.mark.parametrize("line, expected", [("// x", True), ("   //x", True), ("x // y", False), ("/* x */", False)])
def test_is_commented_line(line, expected):
    assert is_commented_line(line) is expected


def test_apply_changes_uses_byte_offsets():
    text = "é = 1;"
    assert apply_changes(text, [TextChange(Span(byte_length("é"), 0), "x")]) == "éx = 1;"


def test_apply_changes_rejects_out_of_range():
    with pytest.raises(UsageError):
        apply_changes("abc", [TextChange(Span(2, 5), "")])


def test_fix_action_requires_changes():
    diag = Diagnostic(2304, Category.SEMANTIC, "m", Span(0, 1), 1)
    with pytest.raises(UsageError):
        FixAction("x", "d", (), diag)


def test_fix_action_rejects_overlapping_changes():
    diag = Diagnostic(2304, Category.SEMANTIC, "m", Span(0, 1), 1)
    with pytest.raises(UsageError):
        FixAction("x", "d", (TextChange(Span(0, 3), "a"), TextChange(Span(2, 1), "b")), diag)


def test_diagnostic_round_trips_through_dict():
    diag = Diagnostic(1005, Category.SYNTAX, "')' expected.", Span(4, 1), 2)
    assert Diagnostic.from_dict(diag.to_dict()) == diag

from __future__ import annotations

import pytest

from conftest import known_text
from snipfix import codes
from snipfix.analyzer import check
from snipfix.fixes import (
    FixStyle,
    apply_batch,
    codefixes_for,
    register_codefix,
    registered_codes,
    run_codefixes,
    targeted_fixes,
)
from snipfix.fixes import _REGISTRY
from snipfix.source import Category, Diagnostic, FixAction, Snippet, Span, TextChange, UsageError


def fix(text, **kw):
    return targeted_fixes(Snippet.from_text(text), **kw)


def test_http_snippet_gains_require_and_hinted_placeholder():
    outcome = fix(known_text("http-get.js"))
    lines = outcome.text_after.split("\n")
    assert lines[0] == 'const http = require("http");'
    assert lines[1] == 'var url = "YOUR VALUE HERE"; // Suggested Type: string | RequestOptions | URL'
    assert [a.fix_id for a in outcome.applied] == ["targeted/require", "targeted/placeholder"]


def test_member_base_gets_string_placeholder():
    outcome = fix(known_text("split-words.js"))
    assert outcome.text_after == 'var s = "YOUR VALUE HERE";\nvar words = s.split(" ");'
    assert outcome.diagnostics_after == []


def test_undefined_function_is_left_alone():
    outcome = fix("undefFn();")
    assert outcome.applied == []
    assert outcome.text_after == "undefFn();"
    assert [s.reason for s in outcome.skipped] == ["undefined function"]


def test_line_with_unexpected_identifier_is_skipped():
    outcome = fix("Install it with npm")
    assert outcome.applied == []


@pytest.mark.parametrize("text, declaration", [
    ("Math.max(n);", "var n = 0;"),
    ('const path = require("path");\npath.join(dir);', 'var dir = "YOUR VALUE HERE";'),
    ("console.log(value);", 'var value = "YOUR VALUE HERE";'),
])
def test_placeholder_value_follows_hint(text, declaration):
    assert declaration in fix(text).text_after


def test_require_goes_after_shebang():
    outcome = fix("#!/usr/bin/env node\nos.hostname();")
    assert outcome.text_after == '#!/usr/bin/env node\nconst os = require("os");\nos.hostname();'


def test_each_name_is_handled_once():
    outcome = fix("console.log(a);\nconsole.log(a);")
    assert outcome.text_after.count("var a =") == 1


def test_placeholder_goes_before_the_enclosing_statement():
    outcome = fix("if (true) {\n  console.log(v);\n}")
    assert outcome.text_after.startswith('var v = "YOUR VALUE HERE";\nif (true)')


def test_inline_statement_gets_inline_placeholder_with_block_comment():
    outcome = fix('const http = require("http"); http.get(url, function () {});')
    assert '/* Suggested Type: string | RequestOptions | URL */ http.get' in outcome.text_after


def test_custom_style():
    style = FixStyle(placeholder="TODO", declaration_keyword="let", quote="'")
    assert fix("console.log(v);", style=style).text_after.startswith("let v = 'TODO';")


def test_tied_count_keeps_the_fix():
    # two 2304s become two 2339s on the string placeholder
    outcome = fix("s.foo();\ns.bar();")
    assert outcome.text_after.startswith('var s = "YOUR VALUE HERE";')
    assert [d.code for d in outcome.diagnostics_after] == [2339, 2339]


def test_fix_that_raises_count_is_rejected():
    def penalize(snippet):
        result = check(snippet)
        if "YOUR VALUE HERE" in snippet.text:
            result.diagnostics = result.diagnostics + [diag_at(0), diag_at(1)]
        return result

    outcome = fix("console.log(v);", check_fn=penalize)
    assert outcome.applied == []
    assert outcome.skipped[0].reason == "increased diagnostic count"
    assert outcome.text_after == "console.log(v);"


def test_prepared_inputs_are_accepted():
    result = check("console.log(v);")
    outcome = targeted_fixes(result.snippet, result.diagnostics, result.tree, result.scopes)
    assert outcome.diagnostics_after == []


def test_rename_codefix_for_suggestion():
    result = check("conzole.log(1)")
    actions = codefixes_for(result.diagnostics[0], result)
    assert len(actions) == 1
    assert actions[0].changes == (TextChange(Span(0, 7), "console"),)


def test_plain_cannot_find_name_has_no_codefix():
    result = check("foo;")
    assert codefixes_for(result.diagnostics[0], result) == []


def test_unregistered_code_has_no_codefix():
    result = check("return 1;")
    assert result.diagnostics[0].code not in registered_codes()
    assert codefixes_for(result.diagnostics[0], result) == []


def test_missing_paren_codefix_inserts_closer():
    result = check("console.log('a'\nconsole.log('b');")
    outcome = run_codefixes(result, check)
    assert outcome.text_after == "console.log('a')\nconsole.log('b');"
    assert outcome.diagnostics_after == []


def test_registering_a_codefix_extends_the_registry():
    def drop_return(diag, context):
        return [FixAction("test/drop-return", "drop", (TextChange(Span(diag.span.start, 7), ""),), diag)]

    register_codefix(codes.RETURN_OUTSIDE_FUNCTION, drop_return)
    try:
        result = check("return 1;")
        outcome = run_codefixes(result, check)
        assert outcome.text_after == "1;"
    finally:
        _REGISTRY[codes.RETURN_OUTSIDE_FUNCTION].remove(drop_return)
        if not _REGISTRY[codes.RETURN_OUTSIDE_FUNCTION]:
            del _REGISTRY[codes.RETURN_OUTSIDE_FUNCTION]


def diag_at(start, code=2552):
    return Diagnostic(code, Category.SEMANTIC, "m", Span(start, 1), 1)


def replace(start, length, new, diag_start=None, fix_id="t"):
    diag = diag_at(start if diag_start is None else diag_start)
    return FixAction(fix_id, "d", (TextChange(Span(start, length), new),), diag)


def test_batch_applies_disjoint_replacements():
    text, applied = apply_batch("abc def ghi", [replace(0, 3, "X"), replace(8, 3, "Y")])
    assert text == "X def Y"
    assert len(applied) == 2


def test_batch_keeps_only_one_of_two_edits_on_the_same_span():
    first, second = replace(4, 3, "ONE", diag_start=1), replace(4, 3, "TWO", diag_start=2)
    text, applied = apply_batch("abc def ghi", [second, first])
    assert text == "abc ONE ghi"
    assert applied == [first]


def test_batch_of_nothing_is_identity():
    assert apply_batch("abc", []) == ("abc", [])


def test_batch_keeps_touching_edits():
    text, applied = apply_batch("abcdef", [replace(0, 3, "X"), replace(3, 3, "Y")])
    assert text == "XY"
    assert len(applied) == 2


def test_batch_rejects_partial_overlap():
    text, applied = apply_batch("abcdef", [replace(2, 3, "Y"), replace(0, 3, "X")])
    assert text == "Xdef"
    assert len(applied) == 1


def test_batch_keeps_all_insertions_at_one_offset():
    first = FixAction("t", "d", (TextChange(Span(3, 0), "}"),), diag_at(1))
    second = FixAction("t", "d", (TextChange(Span(3, 0), ")"),), diag_at(2))
    text, applied = apply_batch("abc", [second, first])
    assert text == "abc})"
    assert len(applied) == 2


def test_insertion_inside_a_replacement_is_dropped():
    text, _ = apply_batch("abcdef", [replace(1, 4, "X"), FixAction("t", "d", (TextChange(Span(3, 0), "!"),), diag_at(3))])
    assert text == "aXf"


def test_batch_rejects_out_of_range_span():
    with pytest.raises(UsageError):
        apply_batch("abc", [replace(2, 5, "X")])


def test_codefix_batch_is_reverted_when_count_grows():
    result = check("conzole.log(1)")

    def worse(snippet):
        bad = check(snippet)
        bad.diagnostics = bad.diagnostics + [diag_at(0), diag_at(1)]
        return bad

    outcome = run_codefixes(result, worse)
    assert outcome.text_after == "conzole.log(1)"
    assert outcome.applied == []

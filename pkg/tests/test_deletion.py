from __future__ import annotations

import pytest

from conftest import subset_minimum
from snipfix.analyzer import check
from snipfix.deletion import DeletionBudget, delete_lines, is_emptied
from snipfix.source import Snippet


def delete(text, **kw):
    return delete_lines(Snippet.from_text(text), check, **kw)


HANGING_CLOSE = """const http = require("http");
var url = "YOUR VALUE HERE";
http.get(url, function(res) {
    res.on('data', function(chunk) {});
}).on('error', function(e) {
    console.log(e.message);});
};"""


def test_hanging_close_is_commented_out():
    result = delete(HANGING_CLOSE)
    assert result.text.split("\n")[-1] == "//};"
    assert result.diagnostics == []
    assert result.lines_commented == 1
    assert result.commented == [7]
    assert not result.emptied


def test_clean_input_is_untouched_and_costs_one_compile():
    result = delete("console.log(1);")
    assert result.text == "console.log(1);"
    assert result.compile_count == 1
    assert result.lines_commented == 0


def test_supplied_initial_check_saves_the_first_compile():
    snippet = Snippet.from_text("console.log(1);")
    result = delete_lines(snippet, check, initial=check(snippet))
    assert result.compile_count == 0


def test_two_broken_lines_are_both_commented():
    text = "var x = ;\nvar y = ;"
    result = delete(text)
    assert result.text == "//var x = ;\n//var y = ;"
    assert result.diagnostics == []
    assert subset_minimum(text, check) == 0


def test_snippet_where_every_deletion_hurts_is_unchanged():
    # commenting line 1 undeclares r and t; line 2 has no error of its own
    text = "var p = q, r = 1, t = 2;\nconsole.log(r, t);"
    initial = check(text)
    result = delete(text)
    assert result.text == text
    assert result.compile_count == 1 + initial.count
    # commenting both lines reaches zero; greedy single-line steps cannot see it
    assert subset_minimum(text, check) == 0 < len(result.diagnostics)


def test_ties_are_accepted():
    # removing the only use of an undeclared name trades one error for none
    result = delete("foo;\nconsole.log(1);")
    assert result.text == "//foo;\nconsole.log(1);"


def test_prose_is_emptied():
    result = delete("Install it with npm")
    assert result.text == "//Install it with npm"
    assert result.emptied


def test_already_commented_line_is_not_commented_again():
    result = delete("// note\nvar x = ;")
    assert result.text == "// note\n//var x = ;"


def test_error_past_end_of_text_stops_the_search():
    result = delete("function f() {\n  return 1;\n")
    assert result.out_of_range
    assert result.lines_commented == 0


def test_compile_budget_is_respected():
    text = "\n".join("var v%d = ;" % i for i in range(10))
    result = delete(text, budget=DeletionBudget(max_compiles=4))
    assert result.budget_exhausted
    assert result.compile_count == 4
    assert result.lines_commented == 3


def test_time_budget_is_respected():
    text = "\n".join("var v%d = ;" % i for i in range(50))
    result = delete(text, budget=DeletionBudget(max_seconds=1e-9))
    assert result.budget_exhausted and result.timed_out


@pytest.mark.parametrize("kw", [{"max_compiles": 0}, {"max_seconds": 0}])
def test_budget_must_be_positive(kw):
    with pytest.raises(ValueError):
        DeletionBudget(**kw)


@pytest.mark.parametrize("text, expected", [
    ("//a\n  // b", True),
    ("//a\n\nb", False),
    ("", False),
    ("  \n", False),
])
def test_is_emptied(text, expected):
    assert is_emptied(text) is expected

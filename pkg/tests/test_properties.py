from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LINE_POOL, clash, subset_minimum
from snipfix.analyzer import check, name_suggestion, suggestion_of
from snipfix.deletion import delete_lines
from snipfix.fixes import apply_batch, select_changes, targeted_fixes
from snipfix.parser import parse
from snipfix.pipeline import PipelineConfig, run
from snipfix.source import (
    Category,
    Diagnostic,
    FixAction,
    Snippet,
    Span,
    TextChange,
    apply_changes,
    build_line_index,
    byte_length,
)

js_chars = st.text(alphabet=st.sampled_from(list("abcxyz019 \n\t(){}[];,.=+-*/<>!?:'\"`$#\\@é")), max_size=120)
pooled = st.lists(st.sampled_from(LINE_POOL), min_size=1, max_size=8).map("\n".join)
js_text = st.one_of(js_chars, pooled)


@given(st.text(alphabet=st.sampled_from(list("ab\né€ ")), max_size=60))
def test_line_index_partitions_the_bytes(text):
    index = build_line_index(text)
    assert [r.number for r in index] == list(range(1, len(index) + 1))
    assert index[0].start == 0
    for prev, cur in zip(index, index[1:]):
        assert cur.start == prev.start + prev.length + 1
    last = index[-1]
    assert last.start + last.length == byte_length(text)
    assert len(index) == text.count("\n") + 1


@settings(max_examples=300, deadline=None)
@given(js_text)
def test_parser_never_raises_and_reprints_exactly(text):
    tree, diags = parse(text)
    assert tree.reprint() == text
    assert all(0 <= d.span.start <= byte_length(text) for d in diags)


# each line is broken on its own and leaves no bracket open
BROKEN = ("var x = ;", "foo(1 2);", "const = 5;", "a = [1 2];", "if () {}", "x = 1 +;", "obj = {a:};", "y = );")
VALID = ("console.log(1);", "var ok = 2;", "")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(BROKEN), min_size=3, max_size=8), st.randoms(use_true_random=False))
def test_independent_syntax_errors_are_all_found(broken, rnd):
    lines = list(broken)
    for _ in range(rnd.randint(0, 4)):
        lines.insert(rnd.randint(0, len(lines)), rnd.choice(VALID))
    syntax = [d for d in check("\n".join(lines)).diagnostics if d.category is Category.SYNTAX]
    assert len(syntax) >= len(broken) - 1



def diag_at(start, code):
    return Diagnostic(code, Category.SEMANTIC, "m", Span(start, 1), 1)


@st.composite
def edit_sets(draw):
    text = draw(st.text(alphabet="abcdé\n", min_size=0, max_size=30))
    size = byte_length(text)
    # only spans on character boundaries are meaningful edits
    bounds = sorted({byte_length(text[:i]) for i in range(len(text) + 1)})
    actions = []
    for n in range(draw(st.integers(0, 6))):
        changes = []
        for _ in range(draw(st.integers(1, 2))):
            a, b = sorted(draw(st.sampled_from(bounds)) for _ in range(2))
            changes.append(TextChange(Span(a, b - a), draw(st.text(alphabet="XYZ", max_size=3))))
        changes.sort(key=lambda c: c.span.start)
        if any(x.span.end > y.span.start or x.span.start == y.span.start for x, y in zip(changes, changes[1:])):
            changes = changes[:1]
        diag = diag_at(draw(st.integers(0, size)), draw(st.sampled_from([2552, 1005])))
        actions.append(FixAction(f"t{n}", "d", tuple(changes), diag))
    return text, actions


@settings(max_examples=1000, deadline=None)
@given(edit_sets(), st.randoms(use_true_random=False))
def test_batch_edits(case, rnd):
    text, actions = case
    result, applied = apply_batch(text, actions)
    # applied actions keep their input order
    assert applied == [a for a in actions if any(a is b for b in applied)]
    shuffled = list(actions)
    rnd.shuffle(shuffled)
    assert apply_batch(text, shuffled)[0] == result
    kept = [c for _, c in select_changes(text, actions)]
    for i, a in enumerate(kept):
        for b in kept[i + 1:]:
            assert not clash(a.span, b.span)
    flat = [c for a in actions for c in a.changes]
    if all(not clash(x.span, y.span) and x.span.start != y.span.start for i, x in enumerate(flat) for y in flat[i + 1:]):
        sequential = text
        for change in sorted(flat, key=lambda c: c.span.start, reverse=True):
            sequential = apply_changes(sequential, [change])
        assert result == sequential
        assert len(kept) == len(flat)


@settings(max_examples=200, deadline=None)
@given(pooled)
def test_greedy_deletion_is_bounded_by_the_exhaustive_oracle(text):
    snippet = Snippet.from_text(text)
    initial = check(snippet).count
    result = delete_lines(snippet, check)
    final = len(result.diagnostics)
    assert final <= initial
    assert final >= subset_minimum(snippet.text, check)


@settings(max_examples=200, deadline=None)
@given(js_text, st.sampled_from(["fs", "leftpad", "http", "./local", "node:os"]))
def test_suppression_only_removes_missing_module_diagnostics(text, module):
    text = f'const m = require("{module}");\n' + text
    quiet = check(text).diagnostics
    loud = check(text, suppress_missing_module=False).diagnostics
    assert quiet == [d for d in loud if d.code != 2307]


@settings(max_examples=200, deadline=None)
@given(js_text)
def test_check_is_deterministic_and_sorted(text):
    first = check(text).diagnostics
    assert first == check(text).diagnostics
    assert [d.sort_key for d in first] == sorted(d.sort_key for d in first)


NEAR = st.text(alphabet="consleprt", min_size=2, max_size=8)


@settings(max_examples=300, deadline=None)
@given(st.lists(NEAR, max_size=5, unique=True), NEAR)
def test_indexed_suggestions_agree_with_brute_force(declared, name):
    if name in declared or not name.isidentifier():
        return
    declared = [d for d in declared if d.isidentifier()]
    text = "".join(f"var {d} = 1;\n" for d in declared) + f"{name};"
    result = check(text)
    diag = [d for d in result.diagnostics if d.code in (2304, 2552)]
    if not diag:
        # the name is an ambient global
        return
    assert suggestion_of(diag[-1]) == name_suggestion(name, result.scopes.global_scope, result.env)


@settings(max_examples=200, deadline=None)
@given(pooled)
def test_pipeline_stage_counts_never_increase(text):
    result = run(Snippet.from_text(text), PipelineConfig(timeout_secs=20))
    counts = [s.error_count for s in result.snapshots]
    assert counts == sorted(counts, reverse=True)
    for snap in result.snapshots:
        assert snap.diagnostics == check(snap.text).diagnostics


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(LINE_POOL), min_size=1, max_size=10).map("\n".join))
def test_targeted_fixes_reach_a_fixed_point(text):
    first = targeted_fixes(Snippet.from_text(text))
    assert targeted_fixes(Snippet.from_text(first.text_after)).applied == []

from __future__ import annotations

import json
import time

import pytest

from conftest import HAND_COUNTED, HAND_COUNTED_INITIAL, KNOWN, nested_bomb, read_fixture, records
from snipfix.corpus import (
    CorpusReport,
    build_report,
    diff_report,
    extract_markdown,
    load_inputs,
    load_report,
    read_results,
    run_corpus,
    safe_filename,
    stage_stats,
    write_results,
)
from snipfix.pipeline import PipelineConfig, StageSnapshot
from snipfix.source import Category, Diagnostic, Span, UsageError

FAST = PipelineConfig(timeout_secs=10)


def test_markdown_with_one_js_block():
    readme = "# pkg\n\n```js\nconsole.log(1);\n```\n"
    found = extract_markdown(readme, "pkg")
    assert [(r.id, r.text) for r in found] == [("pkg#1", "console.log(1);")]
    assert found[0].origin.kind == "markdown-readme"


def test_markdown_with_only_python_block():
    assert extract_markdown("```python\nprint(1)\n```\n", "pkg") == []


def test_prompt_readme_yields_two_snippets():
    found = extract_markdown(read_fixture(KNOWN / "prompt" / "README.md"), "prompt")
    assert [r.id for r in found] == ["prompt#1", "prompt#2"]
    assert found[1].text == read_fixture(KNOWN / "prompt-await.js")


@pytest.mark.parametrize("fence", ["```", "~~~", "```javascript", "```node", "~~~~ js"])
def test_markdown_fence_variants(fence):
    closer = fence.split()[0].rstrip("javscriptnode")
    assert len(extract_markdown(f"{fence}\nx();\n{closer}\n", "p")) == 1


def test_unclosed_fence_is_dropped():
    assert extract_markdown("```js\nx();\n```\n\n```js\ny();\n", "p")[-1].text == "x();"


def test_empty_block_is_skipped():
    assert extract_markdown("```js\n\n```\n", "p") == []


def test_load_directory_of_js_files(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "a.js").write_text("a;")
    (tmp_path / "sub" / "b.js").write_text("b;")
    found, failures = load_inputs(tmp_path)
    assert [r.id for r in found] == ["a.js", "sub/b.js"]
    assert failures == []


def test_load_jsonl_with_a_bad_line(tmp_path):
    path = tmp_path / "in.jsonl"
    path.write_text(json.dumps({"id": "one", "text": "x;"}) + "\nnot json\n")
    found, failures = load_inputs(path)
    assert [r.id for r in found] == ["one"]
    assert len(failures) == 1


def test_load_readmes_names_packages_by_directory():
    found, _ = load_inputs(KNOWN, extract=True)
    assert [r.id for r in found] == ["prompt#1", "prompt#2"]


def test_unreadable_file_is_reported_and_the_rest_continue(tmp_path):
    (tmp_path / "good.js").write_text("x;")
    (tmp_path / "bad.js").write_bytes(b"\xff\xfe\xfa")
    found, failures = load_inputs(tmp_path)
    assert [r.id for r in found] == ["good.js"]
    assert failures[0].source.endswith("bad.js")


def test_missing_path_is_a_failure(tmp_path):
    assert load_inputs(tmp_path / "nope")[1][0].reason == "no such file or directory"


def test_duplicate_ids_are_rejected():
    recs = records({"a": "x;"}) * 2
    with pytest.raises(UsageError):
        run_corpus(recs, FAST, isolate=False)


def test_hand_counted_histogram():
    report, results = run_corpus(records(HAND_COUNTED), FAST, isolate=False)
    initial = report.stages["initial"]
    assert initial.counts() == HAND_COUNTED_INITIAL
    assert initial.total_errors == 11
    assert initial.error_free_count == 2
    assert initial.erroneous_count == 8
    assert initial.avg_errors_per_snippet == pytest.approx(1.1)
    assert initial.avg_errors_per_erroneous_snippet == pytest.approx(11 / 8)
    assert initial.histogram[0] == (2304, 4, "Cannot find name")
    assert [r.snippet_id for r in results] == sorted(HAND_COUNTED)


@pytest.mark.parametrize("parallelism", [1, 4, 8])
def test_isolated_runs_agree_with_in_process_run(parallelism):
    expected, _ = run_corpus(records(HAND_COUNTED), FAST, isolate=False)
    report, results = run_corpus(records(HAND_COUNTED), FAST, parallelism)
    assert report.to_dict() == expected.to_dict()
    assert [r.snippet_id for r in results] == sorted(HAND_COUNTED)


def test_empty_corpus():
    report, results = run_corpus([], FAST)
    assert results == []
    assert report.snippet_count == 0
    assert report.stages["initial"].avg_errors_per_snippet == 0.0


def test_known_inputs_all_end_error_free():
    texts = {p.name: read_fixture(p) for p in sorted(KNOWN.glob("*.js"))}
    report, _ = run_corpus(records(texts), FAST, isolate=False)
    assert report.snippet_count == 4
    assert report.stages["deletion"].error_free_count == 4


def test_pathological_snippet_does_not_poison_the_run():
    texts = {"a-bomb": nested_bomb(), "b-clean": "console.log(1);", "c-split": read_fixture(KNOWN / "split-words.js")}
    config = PipelineConfig(timeout_secs=0.5)
    started = time.monotonic()
    report, results = run_corpus(records(texts), config, parallelism=1)
    assert time.monotonic() - started < 3 * (0.5 + 2)
    bomb, clean, split = results
    assert bomb.timed_out
    assert not clean.timed_out and clean.final_diagnostics == []
    assert not split.timed_out and split.final_diagnostics == []
    assert report.timed_out_count == 1


def test_hung_worker_is_killed_by_the_watchdog(monkeypatch):
    import snipfix.corpus as corpus

    real_run = corpus.run

    def maybe_hang(snippet, config, *args, **kwargs):
        if snippet.id == "hang":
            time.sleep(60)
        return real_run(snippet, config, *args, **kwargs)

    monkeypatch.setattr(corpus, "run", maybe_hang)
    started = time.monotonic()
    report, results = run_corpus(records({"hang": "x;", "later": "conzole.log(1);"}), PipelineConfig(timeout_secs=0.5))
    assert time.monotonic() - started < 0.5 + 2
    hung, later = results
    assert hung.timed_out
    assert len(hung.snapshots) == 4
    assert later.final_text == "console.log(1);"


def test_results_round_trip_through_jsonl(tmp_path):
    report, results = run_corpus(records(HAND_COUNTED), FAST, isolate=False)
    path = tmp_path / "results.jsonl"
    write_results(results, path)
    assert build_report(read_results(path)).to_dict() == report.to_dict()


def test_report_round_trips_through_json(tmp_path):
    report, _ = run_corpus(records(HAND_COUNTED), FAST, isolate=False)
    path = tmp_path / "report.json"
    path.write_text(report.to_json())
    assert load_report(path).to_dict() == report.to_dict()


def test_report_with_wrong_schema_is_rejected():
    with pytest.raises(UsageError):
        CorpusReport.from_dict({"schema": "ncc-report/0"})


def test_render_lists_stages_and_top_codes():
    report, _ = run_corpus(records(HAND_COUNTED), FAST, isolate=False)
    text = report.render(top=2)
    assert "snippets: 10" in text
    assert "Cannot find name" in text
    assert "top 2 errors after initial:" in text


def snap(*codes_):
    diags = [Diagnostic(c, Category.SEMANTIC, "m", Span(0, 1), 1) for c in codes_]
    return StageSnapshot("deletion", "", diags)


def report_with(*snaps):
    stats = stage_stats(list(snaps))
    return CorpusReport(len(snaps), {s: stats for s in ("initial", "targeted", "codefix", "deletion")})


def test_identical_reports_have_zero_deltas():
    report = report_with(snap(2304, 2304), snap())
    delta = diff_report(report, report)
    assert all(d["delta"] == 0 for d in delta.code_deltas)
    assert delta.total_delta == 0


def test_diff_of_one_code():
    before = report_with(snap(*[2304] * 5))
    after = report_with(snap(2304, 2304))
    delta = diff_report(before, after)
    assert delta.code_deltas == [{"code": 2304, "label": "Cannot find name", "before": 5, "after": 2, "delta": -3}]
    assert delta.to_dict()["schema"] == "ncc-diff/1"


def test_diff_requires_matching_snippet_counts():
    with pytest.raises(UsageError):
        diff_report(report_with(snap()), report_with(snap(), snap()))


def test_initial_to_final_delta_is_never_positive():
    from conftest import corpus_snippets

    recs = records({s.id: s.text for s in corpus_snippets()})
    report, _ = run_corpus(recs, FAST, isolate=False)
    assert diff_report(report, report, "initial", "deletion").total_delta <= 0


@pytest.mark.parametrize("snippet_id, name", [
    ("prompt#1", "prompt_1.js"),
    ("sub/a.js", "sub_a.js"),
    ("...", "snippet.js"),
])
def test_safe_filename(snippet_id, name):
    assert safe_filename(snippet_id) == name

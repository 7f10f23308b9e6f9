from __future__ import annotations

from pathlib import Path

import pytest

from snipfix.corpus import IngestRecord
from snipfix.source import Origin, Snippet, Span

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
KNOWN = FIXTURES / "known"
SYNTHETIC = FIXTURES / "synthetic"
GOLDEN = TESTS / "golden"


def read_fixture(path: Path) -> str:
    return path.read_bytes().decode("utf-8")


def known_text(name: str) -> str:
    return read_fixture(KNOWN / name)


def corpus_paths() -> list[Path]:
    """Every .js fixture: the known snippets plus the synthetic set."""
    return sorted(KNOWN.glob("*.js")) + sorted(SYNTHETIC.glob("*.js"))


def corpus_snippets() -> list[Snippet]:
    return [
        Snippet.from_text(read_fixture(p), id=f"{p.parent.name}/{p.name}", origin=Origin("file", str(p)))
        for p in corpus_paths()
    ]


def nested_bomb(lines: int = 1500) -> str:
    """Deeply nested, never-closed brackets on every line; slow to analyze."""
    return "\n".join(f"v{i} = " + "(" * 40 + "[{" * 20 + f" b{i} ;" for i in range(lines))


def records(texts: dict[str, str]) -> list[IngestRecord]:
    return [IngestRecord(k, Origin("inline", k), v) for k, v in texts.items()]


@pytest.fixture
def http_get() -> Snippet:
    return Snippet.from_text(known_text("http-get.js"), id="http-get")


# ten snippets whose initial diagnostics were counted by hand
HAND_COUNTED = {
    "a-clean": "console.log(1);",
    "b-clean": "var x = 1;",
    "c-undeclared": "foo;",
    "d-typo": "conzole.log(1);",
    "e-missing-expr": "var a = ;",
    "f-missing-expr-twice": "var a = ;\nvar b = ;",
    "g-two-undeclared": "bar + baz;",
    "h-await": "await f();",
    "i-return": "return 1;",
    "j-property": 'let s = "a";\ns.nope;',
}
HAND_COUNTED_INITIAL = {2304: 4, 1109: 3, 2552: 1, 1375: 1, 1108: 1, 2339: 1}


def subset_minimum(text: str, check) -> int:
    """Fewest diagnostics over every way of commenting out a set of lines."""
    from itertools import combinations

    from snipfix.source import is_commented_line

    lines = text.split("\n")
    candidates = [i for i, line in enumerate(lines) if not is_commented_line(line)]
    best = None
    for size in range(len(candidates) + 1):
        for chosen in combinations(candidates, size):
            variant = ["//" + line if i in chosen else line for i, line in enumerate(lines)]
            count = check("\n".join(variant)).count
            best = count if best is None else min(best, count)
    return best


# building blocks for random snippets: valid code, fragments, prose and shell
LINE_POOL = (
    "var a = 1;",
    "console.log(a);",
    "function f() {",
    "}",
    "if (a) {",
    "foo(a);",
    "b.c = 2;",
    'let s = "x";',
    's.split(",");',
    "return a;",
    "var x = ;",
    "Install it with npm",
    "await g();",
    "http.get(url, cb);",
    "conzole.log(1);",
    "});",
    ")",
    "const {p} = q;",
    "x = [1, 2",
    "// comment",
    "",
    "npm install foo",
    "a.b(",
    "...",
    "for (const k of list) {",
    "new Thing();",
    "  .then(r => r.json())",
    "$ node app.js",
)


def random_snippet(rng, max_lines: int = 8) -> str:
    return "\n".join(rng.choice(LINE_POOL) for _ in range(rng.randint(1, max_lines)))


def clash(a: Span, b: Span) -> bool:
    """Overlap of two edits; an insertion clashes only when strictly inside the other span."""
    if a.length and b.length:
        return a.start < b.end and b.start < a.end
    if a.length:
        return a.start < b.start < a.end
    if b.length:
        return b.start < a.start < b.end
    return False

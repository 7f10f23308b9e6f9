"""Published diagnostic code table.

Codes reuse the TypeScript numbering where a counterpart exists; engine-only
diagnostics live in the 9xxx range.
"""
from __future__ import annotations

from typing import NamedTuple

from .source import Category, Diagnostic, Snippet, Span, line_of


class CodeInfo(NamedTuple):
    code: int
    category: Category
    template: str
    label: str


_S = Category.SYNTAX
_M = Category.SEMANTIC

CODES: dict[int, CodeInfo] = {
    info.code: info
    for info in [
        CodeInfo(1002, _S, "Unterminated string literal.", "Unterminated string literal"),
        CodeInfo(1003, _S, "Identifier expected.", "Identifier expected"),
        CodeInfo(1005, _S, "'{0}' expected.", "Character expected"),
        CodeInfo(1010, _S, "'*/' expected.", "Comment terminator expected"),
        CodeInfo(1109, _S, "Expression expected.", "Expression expected"),
        CodeInfo(1127, _S, "Invalid character.", "Invalid character"),
        CodeInfo(1128, _S, "Declaration or statement expected.", "Declaration or statement expected"),
        CodeInfo(1160, _S, "Unterminated template literal.", "Unterminated template literal"),
        CodeInfo(1161, _S, "Unterminated regular expression literal.", "Unterminated regular expression"),
        CodeInfo(
            1351, _S,
            "An identifier or keyword cannot immediately follow a numeric literal.",
            "Identifier follows numeric literal",
        ),
        CodeInfo(1434, _S, "Unexpected keyword or identifier.", "Unexpected keyword or identifier"),
        CodeInfo(9001, _S, "Maximum nesting depth exceeded.", "Nesting too deep"),
        CodeInfo(
            1108, _M, "A 'return' statement can only be used within a function body.",
            "Return outside function",
        ),
        CodeInfo(
            1308, _M,
            "'await' expressions are only allowed within async functions and at the top levels of modules.",
            "Await outside async function",
        ),
        CodeInfo(
            1375, _M,
            "'await' expressions are only allowed at the top level of a file when that file is a module, "
            "but this file has no imports or exports.",
            "Top level await",
        ),
        CodeInfo(2304, _M, "Cannot find name '{0}'.", "Cannot find name"),
        CodeInfo(2307, _M, "Cannot find module '{0}' or its corresponding type declarations.",
                 "Cannot find module"),
        CodeInfo(2339, _M, "Property '{0}' does not exist on type '{1}'.", "Property does not exist on type"),
        CodeInfo(2349, _M, "This expression is not callable.", "Expression not callable"),
        CodeInfo(2351, _M, "This expression is not constructable.", "Expression not constructable"),
        CodeInfo(2552, _M, "Cannot find name '{0}'. Did you mean '{1}'?", "Cannot find name (suggestion)"),
        CodeInfo(9000, _M, "Analysis did not complete: {0}.", "Analysis did not complete"),
        CodeInfo(9002, _M, "Import declarations are not allowed in CommonJS script mode; use require().",
                 "Import in script mode"),
        CodeInfo(9003, _M, "Export declarations are not allowed in CommonJS script mode; use module.exports.",
                 "Export in script mode"),
    ]
}

EXPECTED = 1005
EXPRESSION_EXPECTED = 1109
UNEXPECTED_KEYWORD_OR_IDENTIFIER = 1434
STATEMENT_EXPECTED = 1128
CANNOT_FIND_NAME = 2304
CANNOT_FIND_NAME_SUGGESTION = 2552
CANNOT_FIND_MODULE = 2307
PROPERTY_DOES_NOT_EXIST = 2339
NOT_CALLABLE = 2349
NOT_CONSTRUCTABLE = 2351
TOP_LEVEL_AWAIT = 1375
AWAIT_OUTSIDE_ASYNC = 1308
RETURN_OUTSIDE_FUNCTION = 1108
ANALYSIS_INCOMPLETE = 9000


def message(code: int, *args: str) -> str:
    return CODES[code].template.format(*args)


def label(code: int) -> str:
    info = CODES.get(code)
    return info.label if info else f"TS{code}"


def category(code: int) -> Category:
    return CODES[code].category


def make_diagnostic(code: int, start: int, length: int, snippet: Snippet, *args: str) -> Diagnostic:
    """Build a Diagnostic, deriving its line from ``snippet``'s line index.

    Spans at or past the end of the text (EOF diagnostics) get the last line.
    """
    span = Span(start, length)
    line = line_of(span, snippet)
    if not line:
        line = snippet.line_count
    return Diagnostic(code, category(code), message(code, *args), span, line)

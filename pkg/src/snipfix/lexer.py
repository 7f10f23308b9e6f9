"""Recovering tokenizer for the supported JavaScript subset.

Every byte of input ends up in exactly one token: significant tokens carry
their leading whitespace and comments as trivia, and the trailing trivia is
attached to the final EOF token.  Lexical problems never abort; they are
recorded on the offending token as a diagnostic code.
"""
from __future__ import annotations

import re
import time
from dataclasses import dataclass
from itertools import accumulate
from typing import Optional

IDENTIFIER = "identifier"
KEYWORD = "keyword"
PUNCT = "punctuation"
STRING = "string"
NUMBER = "number"
TEMPLATE = "template"
REGEX = "regex"
COMMENT = "comment"
WHITESPACE = "whitespace"
ERROR = "error"
EOF = "eof"

KEYWORDS = frozenset(
    """break case catch class const continue debugger default delete do else
    export extends false finally for function if import in instanceof new null
    return super switch this throw true try typeof var void while with""".split()
)

# keywords after which a '/' starts a regular expression
_REGEX_AFTER_KEYWORDS = frozenset(
    "return typeof case do else in instanceof new delete void throw".split()
) | {"yield", "await"}
_VALUE_KEYWORDS = frozenset({"this", "super", "null", "true", "false"})

_PUNCTUATORS = sorted(
    """>>>= ... === !== **= <<= >>= >>> &&= ||= ??= => == != <= >= && || ?? ?.
    ++ -- += -= *= /= %= &= |= ^= ** << >> { } ( ) [ ] ; , < > + - * / % & | ^
    ! ~ ? : = . @ #""".split(),
    key=len,
    reverse=True,
)
_PUNCT_RE = re.compile("|".join(re.escape(p) for p in _PUNCTUATORS))
_WS_RE = re.compile("[ \\t\\f\\v\\r\\n\\u00a0\\ufeff\\u1680\\u2000-\\u200a\\u2028\\u2029\\u202f\\u205f\\u3000]+")
_UNICODE_ESCAPE = r"\\u[0-9a-fA-F]{4}|\\u\{[0-9a-fA-F]+\}"
_IDENT_RE = re.compile(rf"(?:[^\W\d]|\$|{_UNICODE_ESCAPE})(?:[\w$\u200c\u200d]|{_UNICODE_ESCAPE})*")
_NUMBER_RE = re.compile(
    r"0[xX][0-9a-fA-F_]*n?|0[oO][0-7_]*n?|0[bB][01_]*n?"
    r"|(?:\d[\d_]*(?:\.[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?\d[\d_]*)?n?"
)
_IDENT_START_RE = re.compile(r"[^\W\d]|\$")

_NEWLINE_RE = re.compile("[\\n\\r\\u2028\\u2029]")

_DEADLINE_STRIDE = 512


class AnalysisTimeout(Exception):
    """Raised when analysis runs past its deadline."""


def check_deadline(deadline: Optional[float]) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise AnalysisTimeout("analysis exceeded its time budget")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    start: int
    end: int
    leading: tuple["Token", ...] = ()
    nl_before: bool = False
    error_code: Optional[int] = None
    # template pieces: "full", "head", "middle", "tail"
    part: Optional[str] = None

    @property
    def full_start(self) -> int:
        return self.leading[0].start if self.leading else self.start

    @property
    def full_text(self) -> str:
        return "".join(t.text for t in self.leading) + self.text

    def is_punct(self, *values: str) -> bool:
        return self.kind == PUNCT and self.text in values

    def is_word(self, *values: str) -> bool:
        return self.kind in (IDENTIFIER, KEYWORD) and self.text in values

    def __repr__(self) -> str:
        return f"Token({self.kind} {self.text!r} @{self.start})"


def string_value(token: Token) -> Optional[str]:
    """Decoded value of a string literal token (simple escapes only)."""
    if token.kind != STRING or len(token.text) < 2 or token.error_code:
        return None
    body = token.text[1:-1]
    if "\\" not in body:
        return body
    out = []
    i = 0
    simple = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            out.append(simple.get(nxt, nxt if nxt != "\n" else ""))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Scanner:
    def __init__(self, text: str, deadline: Optional[float]):
        self.text = text
        self.n = len(text)
        self.deadline = deadline
        if text.isascii():
            self.byte = None
        else:
            offsets = [0]
            offsets.extend(accumulate(len(ch.encode("utf-8")) for ch in text))
            self.byte = offsets
        self.braces: list[str] = []
        self.tokens: list[Token] = []
        self.trivia: list[Token] = []
        self.prev: Optional[Token] = None

    def _b(self, pos: int) -> int:
        return pos if self.byte is None else self.byte[pos]

    def _make(self, kind, start, end, error_code=None):
        return Token(kind, self.text[start:end], self._b(start), self._b(end), error_code=error_code)

    def _emit(self, kind, start, end, error_code=None, part=None):
        leading = tuple(self.trivia)
        nl = any(_NEWLINE_RE.search(t.text) for t in leading)
        tok = Token(
            kind, self.text[start:end], self._b(start), self._b(end),
            leading=leading, nl_before=nl, error_code=error_code, part=part,
        )
        self.trivia = []
        self.tokens.append(tok)
        self.prev = tok
        return tok

    def _regex_allowed(self) -> bool:
        prev = self.prev
        if prev is None:
            return True
        if prev.kind in (NUMBER, STRING, REGEX):
            return False
        if prev.kind == TEMPLATE:
            return prev.part in ("head", "middle")
        if prev.kind == IDENTIFIER:
            return prev.text in _REGEX_AFTER_KEYWORDS
        if prev.kind == KEYWORD:
            return prev.text not in _VALUE_KEYWORDS
        if prev.kind == PUNCT:
            return prev.text not in (")", "]", "}", "++", "--")
        return True

    def run(self) -> list[Token]:
        text = self.text
        pos = 0
        steps = 0
        if text.startswith("#!"):
            end = text.find("\n")
            end = self.n if end < 0 else end
            self.trivia.append(self._make(COMMENT, 0, end))
            pos = end
        while pos < self.n:
            steps += 1
            if steps % _DEADLINE_STRIDE == 0:
                check_deadline(self.deadline)
            ch = text[pos]
            m = _WS_RE.match(text, pos)
            if m:
                self.trivia.append(self._make(WHITESPACE, pos, m.end()))
                pos = m.end()
                continue
            if ch == "/" and pos + 1 < self.n and text[pos + 1] == "/":
                end = text.find("\n", pos)
                end = self.n if end < 0 else end
                self.trivia.append(self._make(COMMENT, pos, end))
                pos = end
                continue
            if ch == "/" and pos + 1 < self.n and text[pos + 1] == "*":
                end = text.find("*/", pos + 2)
                if end < 0:
                    self.trivia.append(self._make(COMMENT, pos, self.n, error_code=1010))
                    pos = self.n
                else:
                    self.trivia.append(self._make(COMMENT, pos, end + 2))
                    pos = end + 2
                continue
            if ch in "\"'":
                pos = self._string(pos)
                continue
            if ch == "`":
                pos = self._template(pos, pos + 1, "`")
                continue
            if ch == "}" and self.braces and self.braces[-1] == "${":
                self.braces.pop()
                pos = self._template(pos, pos + 1, "}")
                continue
            if ch.isdigit() or (ch == "." and pos + 1 < self.n and text[pos + 1].isdigit()):
                m = _NUMBER_RE.match(text, pos)
                end = m.end()
                code = 1351 if end < self.n and _IDENT_START_RE.match(text, end) else None
                self._emit(NUMBER, pos, end, error_code=code)
                pos = end
                continue
            m = _IDENT_RE.match(text, pos)
            if m and m.end() > pos:
                word = m.group()
                self._emit(KEYWORD if word in KEYWORDS else IDENTIFIER, pos, m.end())
                pos = m.end()
                continue
            if ch == "/" and self._regex_allowed():
                pos = self._regex(pos)
                continue
            m = _PUNCT_RE.match(text, pos)
            if m and ch == "#" and not _IDENT_START_RE.match(text, pos + 1):
                m = None  # only private names may start with '#'
            if m:
                value = m.group()
                if value == "?." and m.end() < self.n and text[m.end()].isdigit():
                    value = "?"
                end = pos + len(value)
                if value == "{":
                    self.braces.append("{")
                elif value == "}" and self.braces:
                    self.braces.pop()
                self._emit(PUNCT, pos, end)
                pos = end
                continue
            self.trivia.append(self._make(ERROR, pos, pos + 1, error_code=1127))
            pos += 1
        self._emit(EOF, self.n, self.n)
        return self.tokens

    def _string(self, pos: int) -> int:
        text = self.text
        quote = text[pos]
        i = pos + 1
        while i < self.n:
            c = text[i]
            if c == "\\":
                i += 2
                continue
            if c == quote:
                self._emit(STRING, pos, i + 1)
                return i + 1
            if c == "\n":
                break
            i += 1
        i = min(i, self.n)
        self._emit(STRING, pos, i, error_code=1002)
        return i

    def _template(self, pos: int, i: int, opener: str) -> int:
        text = self.text
        while i < self.n:
            c = text[i]
            if c == "\\":
                i += 2
                continue
            if c == "`":
                part = "full" if opener == "`" else "tail"
                self._emit(TEMPLATE, pos, i + 1, part=part)
                return i + 1
            if c == "$" and i + 1 < self.n and text[i + 1] == "{":
                part = "head" if opener == "`" else "middle"
                self.braces.append("${")
                self._emit(TEMPLATE, pos, i + 2, part=part)
                return i + 2
            i += 1
        part = "full" if opener == "`" else "tail"
        self._emit(TEMPLATE, pos, self.n, error_code=1160, part=part)
        return self.n

    def _regex(self, pos: int) -> int:
        text = self.text
        i = pos + 1
        in_class = False
        while i < self.n:
            c = text[i]
            if c == "\\":
                i += 2
                continue
            if c == "\n":
                break
            if c == "[":
                in_class = True
            elif c == "]":
                in_class = False
            elif c == "/" and not in_class:
                i += 1
                while i < self.n and (text[i].isalnum() or text[i] in "_$"):
                    i += 1
                self._emit(REGEX, pos, i)
                return i
            i += 1
        i = min(i, self.n)
        self._emit(REGEX, pos, i, error_code=1161)
        return i


def tokenize(text: str, deadline: Optional[float] = None) -> list[Token]:
    """Significant tokens (ending with EOF); trivia rides on ``Token.leading``."""
    return _Scanner(text, deadline).run()


def lexical_errors(tokens: list[Token]) -> list[tuple[int, int, int]]:
    """(code, start, length) for every lexical problem, trivia included."""
    found = []
    for tok in tokens:
        for triv in tok.leading:
            if triv.error_code:
                length = 2 if triv.error_code == 1010 else triv.end - triv.start
                found.append((triv.error_code, triv.start, length))
        if tok.error_code:
            if tok.error_code == 1351:
                found.append((1351, tok.end, 0))
            else:
                found.append((tok.error_code, tok.start, tok.end - tok.start))
    return found


def reprint(tokens: list[Token]) -> str:
    return "".join(t.full_text for t in tokens)

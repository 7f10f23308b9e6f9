"""Error-recovering recursive-descent parser for a JavaScript subset.

The tree is full-fidelity: every significant token becomes exactly one
:class:`Leaf`, and leaves carry their leading trivia, so concatenating the
leaves reproduces the input.  Recovery is panic mode: the first problem in a
statement is reported, later ones are suppressed until the parser skips to
the next statement boundary.

Class bodies and generator bodies are kept as opaque token runs.
"""
from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from . import codes
from .lexer import (
    EOF,
    IDENTIFIER,
    KEYWORD,
    NUMBER,
    PUNCT,
    REGEX,
    STRING,
    TEMPLATE,
    Token,
    check_deadline,
    lexical_errors,
    tokenize,
)
from .source import Diagnostic, Snippet

MAX_DEPTH = 100
_RECURSION_LIMIT = 6000

ASSIGN_OPS = frozenset("= += -= *= /= %= **= <<= >>= >>>= &= |= ^= &&= ||= ??=".split())
BINARY_PREC = {
    "??": 1, "||": 2, "&&": 3, "|": 4, "^": 5, "&": 6,
    "==": 7, "!=": 7, "===": 7, "!==": 7,
    "<": 8, ">": 8, "<=": 8, ">=": 8, "instanceof": 8, "in": 8,
    "<<": 9, ">>": 9, ">>>": 9,
    "+": 10, "-": 10, "*": 11, "/": 11, "%": 11, "**": 12,
}
UNARY_OPS = frozenset("! ~ + - ++ --".split())
UNARY_KEYWORDS = frozenset({"typeof", "void", "delete"})
STATEMENT_KEYWORDS = frozenset(
    "var let const function class if for while do return try throw switch import export".split()
)
_EXPR_KEYWORDS = frozenset({"this", "super", "null", "true", "false", "function", "class", "new",
                            "typeof", "void", "delete", "import"})
_EXPR_PUNCT = frozenset("( [ { + - ! ~ ++ -- #".split())
CLOSERS = {"(": ")", "[": "]", "{": "}"}


class Leaf:
    __slots__ = ("token", "parent")
    kind = "Token"

    def __init__(self, token: Token):
        self.token = token
        self.parent: Optional[Node] = None

    @property
    def start(self) -> int:
        return self.token.start

    @property
    def end(self) -> int:
        return self.token.end

    @property
    def text(self) -> str:
        return self.token.text

    def leaves(self) -> Iterator["Leaf"]:
        yield self

    def __repr__(self) -> str:
        return f"Leaf({self.token.text!r})"


class Node:
    __slots__ = ("kind", "children", "fields", "parent", "flags", "_pos", "_bounds")

    def __init__(self, kind: str, pos: int = 0):
        self.kind = kind
        self.children: list[Union[Node, Leaf]] = []
        self.fields: dict = {}
        self.parent: Optional[Node] = None
        self.flags: dict = {}
        self._pos = pos
        self._bounds: Optional[tuple[int, int]] = None

    def add(self, role: Optional[str], child):
        if child is None:
            return None
        child.parent = self
        self.children.append(child)
        if role:
            self.fields[role] = child
        return child

    def push(self, role: str, child):
        if child is None:
            return None
        child.parent = self
        self.children.append(child)
        self.fields.setdefault(role, []).append(child)
        return child

    def get(self, role: str, default=None):
        return self.fields.get(role, default)

    def items(self, role: str) -> list:
        return self.fields.get(role, [])

    def leaves(self) -> Iterator[Leaf]:
        stack = [iter(self.children)]
        while stack:
            for child in stack[-1]:
                if isinstance(child, Leaf):
                    yield child
                else:
                    stack.append(iter(child.children))
                    break
            else:
                stack.pop()

    def _compute_bounds(self) -> tuple[int, int]:
        if self._bounds is None:
            first = next(self.leaves(), None)
            if first is None:
                self._bounds = (self._pos, self._pos)
            else:
                node = self
                while not isinstance(node, Leaf):
                    tail = [c for c in node.children if isinstance(c, Leaf) or next(c.leaves(), None)]
                    node = tail[-1]
                self._bounds = (first.start, node.end)
        return self._bounds

    @property
    def start(self) -> int:
        return self._compute_bounds()[0]

    @property
    def end(self) -> int:
        return self._compute_bounds()[1]

    def walk(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(c for c in reversed(node.children) if isinstance(c, Node))

    def __repr__(self) -> str:
        return f"Node({self.kind})"


@dataclass
class SyntaxTree:
    root: Node
    tokens: list[Token]
    text: str
    # (diagnostic start, missing closer) -> byte offset where inserting the closer belongs
    closer_hints: dict[tuple[int, str], int] = field(default_factory=dict)

    def reprint(self) -> str:
        return "".join(leaf.token.full_text for leaf in self.root.leaves())


@contextmanager
def deep_recursion():
    old = sys.getrecursionlimit()
    if old < _RECURSION_LIMIT:
        sys.setrecursionlimit(_RECURSION_LIMIT)
    try:
        yield
    finally:
        if old < _RECURSION_LIMIT:
            sys.setrecursionlimit(old)


def _match_brackets(tokens: list[Token]) -> dict[int, int]:
    matches: dict[int, int] = {}
    stack: list[tuple[str, int]] = []

    def close(kind: str, i: int):
        for depth in range(len(stack) - 1, -1, -1):
            if stack[depth][0] == kind:
                matches[stack[depth][1]] = i
                del stack[depth:]
                return

    for i, tok in enumerate(tokens):
        if tok.kind == PUNCT:
            if tok.text in CLOSERS:
                stack.append((tok.text, i))
            elif tok.text == ")":
                close("(", i)
            elif tok.text == "]":
                close("[", i)
            elif tok.text == "}":
                close("{", i)
        elif tok.kind == TEMPLATE:
            if tok.part in ("middle", "tail"):
                close("${", i)
            if tok.part in ("head", "middle"):
                stack.append(("${", i))
    return matches


class Parser:
    def __init__(self, text: str, deadline: Optional[float] = None):
        self.text = text
        self.deadline = deadline
        self.tokens = tokenize(text, deadline)
        self.matches = _match_brackets(self.tokens)
        self.i = 0
        self.diags: list[tuple[int, int, int, tuple[str, ...]]] = []
        self.hints: dict[tuple[int, str], int] = {}
        self.panic = False
        self.depth = 0
        self.steps = 0
        self.too_deep_reported = False

    # -- token cursor -------------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Optional[Leaf]:
        tok = self.tokens[self.i]
        if tok.kind == EOF:
            return None
        self.i += 1
        self.steps += 1
        if self.steps % 256 == 0:
            check_deadline(self.deadline)
        return Leaf(tok)

    def at(self, *values: str) -> bool:
        return self.cur.is_punct(*values)

    def at_word(self, *values: str) -> bool:
        return self.cur.is_word(*values)

    def at_identifier(self) -> bool:
        return self.cur.kind == IDENTIFIER

    def error(self, code: int, tok: Optional[Token] = None, *args: str) -> None:
        if self.panic:
            return
        self.panic = True
        tok = tok or self.cur
        self.diags.append((code, tok.start, tok.end - tok.start, args))

    def expect(self, value: str) -> Optional[Leaf]:
        if self.at(value):
            return self.advance()
        was_panicking = self.panic
        self.error(codes.EXPECTED, self.cur, value)
        if not was_panicking and value in (")", "]", "}"):
            insert_at = self.tokens[self.i - 1].end if self.i > 0 else 0
            self.hints[(self.cur.start, value)] = insert_at
        return None

    def missing(self) -> Node:
        return Node("Missing", pos=self.cur.start)

    def can_start_expression(self, tok: Optional[Token] = None) -> bool:
        tok = tok or self.cur
        if tok.kind in (IDENTIFIER, NUMBER, STRING, REGEX):
            return True
        if tok.kind == TEMPLATE:
            return tok.part in ("full", "head")
        if tok.kind == KEYWORD:
            return tok.text in _EXPR_KEYWORDS
        return tok.kind == PUNCT and tok.text in _EXPR_PUNCT

    # -- program and statements --------------------------------------------

    def parse_program(self) -> Node:
        program = Node("Program")
        self.statement_list(program, in_block=False)
        program.add("eof", Leaf(self.cur))
        return program

    def statement_list(self, owner: Node, in_block: bool, stop_words: tuple[str, ...] = ()) -> None:
        while True:
            tok = self.cur
            if tok.kind == EOF:
                return
            if in_block and tok.is_punct("}"):
                return
            if stop_words and tok.is_word(*stop_words):
                return
            start = self.i
            owner.push("body", self.statement())
            if self.panic:
                owner.push("body", self.synchronize(start))
                self.panic = False
            if self.i == start:
                err = Node("Error")
                err.add(None, self.advance())
                owner.push("body", err)

    def synchronize(self, start: int) -> Optional[Node]:
        stack: list[str] = []
        for tok in self.tokens[start:self.i]:
            self._track(stack, tok)
        err = Node("Error")
        first = True
        while True:
            tok = self.cur
            if tok.kind == EOF:
                break
            if tok.kind == PUNCT:
                if tok.text == ";" and (not stack or stack[-1] != "{"):
                    err.add(None, self.advance())
                    break
                if tok.text == "}" and "{" not in stack:
                    break
            if tok.nl_before and (self.i > start or not first):
                if not stack:
                    break
                if "{" not in stack and tok.is_word(*STATEMENT_KEYWORDS):
                    break
            self._track(stack, tok)
            err.add(None, self.advance())
            first = False
        return err if err.children else None

    @staticmethod
    def _track(stack: list[str], tok: Token) -> None:
        if tok.kind == PUNCT:
            if tok.text in CLOSERS:
                stack.append(tok.text)
            elif tok.text in (")", "]", "}"):
                opener = {")": "(", "]": "[", "}": "{"}[tok.text]
                if opener in stack:
                    while stack.pop() != opener:
                        pass
        elif tok.kind == TEMPLATE:
            if tok.part in ("middle", "tail") and "{" in stack:
                while stack.pop() != "{":
                    pass
            if tok.part in ("head", "middle"):
                stack.append("{")

    def too_deep(self) -> Node:
        if not self.too_deep_reported:
            self.too_deep_reported = True
            self.diags.append((9001, self.cur.start, self.cur.end - self.cur.start, ()))
            self.panic = True
        err = Node("Error")
        end = self.matches.get(self.i)
        if end is None:
            err.add(None, self.advance())
        else:
            while self.i <= end:
                err.add(None, self.advance())
        return err if err.children else self.missing()

    def statement(self) -> Optional[Node]:
        if self.depth > MAX_DEPTH:
            return self.too_deep()
        self.depth += 1
        try:
            return self._statement()
        finally:
            self.depth -= 1

    def _statement(self) -> Optional[Node]:
        tok = self.cur
        if tok.kind == PUNCT:
            if tok.text == "{":
                return self.block()
            if tok.text == ";":
                node = Node("EmptyStatement")
                node.add(None, self.advance())
                return node
        elif tok.kind == KEYWORD:
            handler = {
                "var": self.variable_statement,
                "const": self.variable_statement,
                "function": self.function_declaration,
                "class": self.class_declaration,
                "if": self.if_statement,
                "for": self.for_statement,
                "while": self.while_statement,
                "do": self.do_statement,
                "return": self.return_statement,
                "break": self.jump_statement,
                "continue": self.jump_statement,
                "throw": self.throw_statement,
                "try": self.try_statement,
                "switch": self.switch_statement,
                "export": self.export_declaration,
                "with": self.with_statement,
            }.get(tok.text)
            if tok.text == "import" and not self.peek().is_punct("(", "."):
                return self.import_declaration()
            if tok.text == "debugger":
                node = Node("DebuggerStatement")
                node.add(None, self.advance())
                self.consume_semicolon(node)
                return node
            if handler is not None:
                return handler()
        elif tok.kind == IDENTIFIER:
            nxt = self.peek()
            if tok.text == "let" and (nxt.kind == IDENTIFIER or nxt.is_punct("[", "{")):
                return self.variable_statement()
            if tok.text == "async" and nxt.is_word("function") and not nxt.nl_before:
                return self.function_declaration()
            if nxt.is_punct(":"):
                node = Node("LabeledStatement")
                label = node.add("label", Node("Label"))
                label.add(None, self.advance())
                node.add(None, self.advance())
                node.add("body", self.statement())
                return node
        if self.can_start_expression(tok):
            node = Node("ExpressionStatement")
            node.add("expression", self.expression())
            self.consume_semicolon(node)
            return node
        self.error(codes.STATEMENT_EXPECTED, tok)
        err = Node("Error")
        err.add(None, self.advance())
        return err if err.children else None

    def consume_semicolon(self, node: Node) -> None:
        tok = self.cur
        if tok.is_punct(";"):
            node.add(None, self.advance())
        elif tok.kind == EOF or tok.is_punct("}") or tok.nl_before:
            return
        elif tok.kind in (IDENTIFIER, KEYWORD):
            self.error(codes.UNEXPECTED_KEYWORD_OR_IDENTIFIER, tok)
        else:
            self.error(codes.EXPECTED, tok, ";")

    def block(self, kind: str = "Block") -> Node:
        node = Node(kind)
        node.add(None, self.expect("{"))
        self.statement_list(node, in_block=True)
        node.add(None, self.expect("}"))
        return node

    def variable_statement(self, in_for: bool = False) -> Node:
        node = Node("VariableDeclaration")
        keyword = node.add(None, self.advance())
        node.flags["declaration_kind"] = keyword.text
        while True:
            decl = Node("VariableDeclarator")
            target = self.binding_target()
            decl.add("id", target)
            if self.at("="):
                decl.add(None, self.advance())
                decl.add("init", self.assignment(no_in=in_for))
            node.push("declarations", decl)
            if self.at(",") and not self.panic:
                node.add(None, self.advance())
                continue
            break
        if not in_for:
            self.consume_semicolon(node)
        return node

    # -- bindings ------------------------------------------------------------

    def binding_identifier(self) -> Optional[Node]:
        if self.at_identifier():
            node = Node("BindingIdentifier")
            node.add(None, self.advance())
            return node
        self.error(1003, self.cur)
        return None

    def binding_target(self) -> Optional[Node]:
        if self.at("["):
            return self.array_pattern()
        if self.at("{"):
            return self.object_pattern()
        return self.binding_identifier()

    def binding_element(self) -> Optional[Node]:
        target = self.binding_target()
        if self.at("="):
            node = Node("AssignmentPattern")
            node.add("target", target)
            node.add(None, self.advance())
            node.add("default", self.assignment())
            return node
        return target

    def rest_element(self) -> Node:
        node = Node("RestElement")
        node.add(None, self.advance())
        node.add("argument", self.binding_target())
        return node

    def array_pattern(self) -> Node:
        node = Node("ArrayPattern")
        node.add(None, self.advance())
        while not self.at("]") and self.cur.kind != EOF:
            if self.at(","):
                node.add(None, self.advance())
                continue
            before = self.i
            if self.at("..."):
                node.push("elements", self.rest_element())
            else:
                node.push("elements", self.binding_element())
            if self.at(","):
                node.add(None, self.advance())
            elif self.i == before or not self.at("]"):
                break
        node.add(None, self.expect("]"))
        return node

    def property_name(self) -> Optional[Node]:
        tok = self.cur
        if tok.kind in (IDENTIFIER, KEYWORD, STRING, NUMBER):
            node = Node("PropertyName")
            node.add(None, self.advance())
            return node
        if tok.is_punct("["):
            node = Node("ComputedName")
            node.add(None, self.advance())
            node.add("expression", self.assignment())
            node.add(None, self.expect("]"))
            return node
        if tok.is_punct("#") and self.peek().kind in (IDENTIFIER, KEYWORD):
            node = Node("PropertyName")
            node.add(None, self.advance())
            node.add(None, self.advance())
            return node
        self.error(1003, tok)
        return None

    def object_pattern(self) -> Node:
        node = Node("ObjectPattern")
        node.add(None, self.advance())
        while not self.at("}") and self.cur.kind != EOF:
            before = self.i
            if self.at("..."):
                node.push("properties", self.rest_element())
            else:
                prop = Node("BindingProperty")
                if self.at_identifier() and not self.peek().is_punct(":", "("):
                    target = Node("BindingIdentifier")
                    target.add(None, self.advance())
                    prop.flags["shorthand"] = True
                    if self.at("="):
                        pattern = Node("AssignmentPattern")
                        pattern.add("target", target)
                        pattern.add(None, self.advance())
                        pattern.add("default", self.assignment())
                        target = pattern
                    prop.add("value", target)
                else:
                    prop.add("key", self.property_name())
                    prop.add(None, self.expect(":"))
                    prop.add("value", self.binding_element())
                node.push("properties", prop)
            if self.at(","):
                node.add(None, self.advance())
            elif self.i == before or not self.at("}"):
                break
        node.add(None, self.expect("}"))
        return node

    def parameters(self, node: Node) -> None:
        node.add(None, self.expect("("))
        while not self.at(")") and self.cur.kind != EOF:
            before = self.i
            if self.at("..."):
                node.push("params", self.rest_element())
            else:
                node.push("params", self.binding_element())
            if self.at(","):
                node.add(None, self.advance())
            elif self.i == before or not self.at(")"):
                break
        node.add(None, self.expect(")"))

    # -- functions and classes -------------------------------------------------

    def function_declaration(self) -> Node:
        return self.function(Node("FunctionDeclaration"), require_name=True)

    def function(self, node: Node, require_name: bool = False) -> Node:
        if self.at_word("async"):
            node.add(None, self.advance())
            node.flags["async"] = True
        node.add(None, self.advance())  # 'function'
        if self.at("*"):
            node.add(None, self.advance())
            node.flags["generator"] = True
        if self.at_identifier():
            node.add("name", self.binding_identifier())
        elif require_name:
            self.error(1003, self.cur)
        self.parameters(node)
        if node.flags.get("generator"):
            node.add("body", self.opaque_body())
        else:
            node.add("body", self.block("FunctionBody"))
        return node

    def opaque_body(self) -> Node:
        node = Node("OpaqueBody")
        if not self.at("{"):
            node.add(None, self.expect("{"))
            return node
        end = self.matches.get(self.i)
        if end is None:
            while self.cur.kind != EOF:
                node.add(None, self.advance())
            node.add(None, self.expect("}"))
            return node
        while self.i <= end:
            node.add(None, self.advance())
        return node

    def class_declaration(self, kind: str = "ClassDeclaration") -> Node:
        node = Node(kind)
        node.add(None, self.advance())  # 'class'
        if self.at_identifier() and not self.cur.is_word("extends"):
            node.add("name", self.binding_identifier())
        elif kind == "ClassDeclaration":
            self.error(1003, self.cur)
        if self.at_word("extends"):
            node.add(None, self.advance())
            node.add("superclass", self.left_hand_side())
        node.add("body", self.opaque_body())
        return node

    def arrow_function(self) -> Node:
        node = Node("ArrowFunction")
        if self.at_word("async") and not self.peek().is_punct("=>"):
            node.add(None, self.advance())
            node.flags["async"] = True
        if self.at("("):
            self.parameters(node)
        else:
            node.push("params", self.binding_identifier())
        node.add(None, self.advance())  # '=>'
        if self.at("{"):
            node.add("body", self.block("FunctionBody"))
        else:
            node.add("body", self.assignment())
        return node

    def _is_arrow_ahead(self) -> bool:
        tok = self.cur
        offset = 0
        if tok.is_word("async") and tok.kind == IDENTIFIER:
            nxt = self.peek()
            if nxt.nl_before:
                return False
            if nxt.kind == IDENTIFIER:
                after = self.peek(2)
                return after.is_punct("=>") and not after.nl_before
            if not nxt.is_punct("("):
                return self.peek().is_punct("=>") and not self.peek().nl_before
            offset = 1
        tok = self.peek(offset)
        if tok.kind == IDENTIFIER:
            nxt = self.peek(offset + 1)
            return nxt.is_punct("=>") and not nxt.nl_before
        if tok.is_punct("("):
            end = self.matches.get(self.i + offset)
            if end is None or end + 1 >= len(self.tokens):
                return False
            arrow = self.tokens[end + 1]
            return arrow.is_punct("=>") and not arrow.nl_before
        return False

    # -- compound statements ----------------------------------------------------

    def if_statement(self) -> Node:
        node = Node("IfStatement")
        node.add(None, self.advance())
        node.add(None, self.expect("("))
        node.add("test", self.expression())
        node.add(None, self.expect(")"))
        node.add("consequent", self.statement())
        if self.at_word("else"):
            node.add(None, self.advance())
            node.add("alternate", self.statement())
        return node

    def for_statement(self) -> Node:
        node = Node("ForStatement")
        node.add(None, self.advance())
        if self.at_word("await"):
            node.add(None, self.advance())
            node.flags["await"] = True
        node.add(None, self.expect("("))
        init = None
        if self.at(";"):
            pass
        elif self.at_word("var", "const") or (
            self.at_word("let") and (self.peek().kind == IDENTIFIER or self.peek().is_punct("[", "{"))
        ):
            init = self.variable_statement(in_for=True)
        else:
            init = self.expression(no_in=True)
        if init is not None and (self.at_word("of") or self.at_word("in")):
            node.kind = "ForOfStatement" if self.cur.text == "of" else "ForInStatement"
            node.add("left", init)
            node.add(None, self.advance())
            node.add("right", self.assignment() if node.kind == "ForOfStatement" else self.expression())
        else:
            node.add("init", init)
            node.add(None, self.expect(";"))
            if not self.at(";"):
                node.add("test", self.expression())
            node.add(None, self.expect(";"))
            if not self.at(")"):
                node.add("update", self.expression())
        node.add(None, self.expect(")"))
        node.add("body", self.statement())
        return node

    def while_statement(self) -> Node:
        node = Node("WhileStatement")
        node.add(None, self.advance())
        node.add(None, self.expect("("))
        node.add("test", self.expression())
        node.add(None, self.expect(")"))
        node.add("body", self.statement())
        return node

    def do_statement(self) -> Node:
        node = Node("DoWhileStatement")
        node.add(None, self.advance())
        node.add("body", self.statement())
        if self.at_word("while"):
            node.add(None, self.advance())
        else:
            self.error(codes.EXPECTED, self.cur, "while")
        node.add(None, self.expect("("))
        node.add("test", self.expression())
        node.add(None, self.expect(")"))
        if self.at(";"):
            node.add(None, self.advance())
        return node

    def with_statement(self) -> Node:
        node = Node("WithStatement")
        node.add(None, self.advance())
        node.add(None, self.expect("("))
        node.add("object", self.expression())
        node.add(None, self.expect(")"))
        node.add("body", self.statement())
        return node

    def return_statement(self) -> Node:
        node = Node("ReturnStatement")
        node.add(None, self.advance())
        if not (self.at(";", "}") or self.cur.kind == EOF or self.cur.nl_before):
            node.add("argument", self.expression())
        self.consume_semicolon(node)
        return node

    def jump_statement(self) -> Node:
        node = Node("BreakStatement" if self.cur.text == "break" else "ContinueStatement")
        node.add(None, self.advance())
        if self.at_identifier() and not self.cur.nl_before:
            label = node.add("label", Node("Label"))
            label.add(None, self.advance())
        self.consume_semicolon(node)
        return node

    def throw_statement(self) -> Node:
        node = Node("ThrowStatement")
        node.add(None, self.advance())
        if self.cur.nl_before or self.cur.kind == EOF:
            self.error(codes.EXPRESSION_EXPECTED, self.cur)
        else:
            node.add("argument", self.expression())
        self.consume_semicolon(node)
        return node

    def try_statement(self) -> Node:
        node = Node("TryStatement")
        node.add(None, self.advance())
        node.add("block", self.block())
        if self.at_word("catch"):
            handler = node.add("handler", Node("CatchClause"))
            handler.add(None, self.advance())
            if self.at("("):
                handler.add(None, self.advance())
                handler.add("param", self.binding_target())
                handler.add(None, self.expect(")"))
            handler.add("body", self.block())
        if self.at_word("finally"):
            node.add(None, self.advance())
            node.add("finalizer", self.block())
        if "handler" not in node.fields and "finalizer" not in node.fields:
            self.error(codes.EXPECTED, self.cur, "catch")
        return node

    def switch_statement(self) -> Node:
        node = Node("SwitchStatement")
        node.add(None, self.advance())
        node.add(None, self.expect("("))
        node.add("discriminant", self.expression())
        node.add(None, self.expect(")"))
        node.add(None, self.expect("{"))
        while self.at_word("case", "default"):
            case = Node("SwitchCase")
            keyword = case.add(None, self.advance())
            if keyword.text == "case":
                case.add("test", self.expression())
            case.add(None, self.expect(":"))
            if self.panic:
                case.push("body", self.synchronize(self.i))
                self.panic = False
            self.statement_list(case, in_block=True, stop_words=("case", "default"))
            node.push("cases", case)
        node.add(None, self.expect("}"))
        return node

    def import_declaration(self) -> Node:
        node = Node("ImportDeclaration")
        node.add(None, self.advance())
        if self.cur.kind == STRING:
            node.add("source", self.literal())
            self.consume_semicolon(node)
            return node
        if self.at_identifier() and not self.at_word("from"):
            node.push("specifiers", self.binding_identifier())
            if self.at(","):
                node.add(None, self.advance())
        if self.at("*"):
            node.add(None, self.advance())
            if self.at_word("as"):
                node.add(None, self.advance())
            else:
                self.error(codes.EXPECTED, self.cur, "as")
            node.push("specifiers", self.binding_identifier())
        elif self.at("{"):
            node.add(None, self.advance())
            while not self.at("}") and self.cur.kind != EOF:
                before = self.i
                if self.peek().is_word("as"):
                    imported = Node("PropertyName")
                    imported.add(None, self.advance())
                    node.add(None, imported)
                    node.add(None, self.advance())
                node.push("specifiers", self.binding_identifier())
                if self.at(","):
                    node.add(None, self.advance())
                elif self.i == before or not self.at("}"):
                    break
            node.add(None, self.expect("}"))
        if self.at_word("from"):
            node.add(None, self.advance())
            if self.cur.kind == STRING:
                node.add("source", self.literal())
            else:
                self.error(codes.EXPECTED, self.cur, "string")
        else:
            self.error(codes.EXPECTED, self.cur, "from")
        self.consume_semicolon(node)
        return node

    def export_declaration(self) -> Node:
        node = Node("ExportDeclaration")
        node.add(None, self.advance())
        if self.at_word("default"):
            node.add(None, self.advance())
            if self.at_word("function") or (self.at_word("async") and self.peek().is_word("function")):
                node.add("declaration", self.function(Node("FunctionDeclaration")))
            elif self.at_word("class"):
                node.add("declaration", self.class_declaration("ClassExpression"))
            else:
                node.add("expression", self.assignment())
                self.consume_semicolon(node)
            return node
        if self.at("{") or self.at("*"):
            if self.at("*"):
                node.add(None, self.advance())
                if self.at_word("as"):
                    node.add(None, self.advance())
                    name = Node("PropertyName")
                    name.add(None, self.advance())
                    node.add(None, name)
            else:
                node.add(None, self.advance())
                while not self.at("}") and self.cur.kind != EOF:
                    before = self.i
                    if self.at_identifier() or self.cur.kind == KEYWORD:
                        ref = Node("ExportSpecifier")
                        ref.add(None, self.advance())
                        node.push("specifiers", ref)
                        if self.at_word("as"):
                            node.add(None, self.advance())
                            alias = Node("PropertyName")
                            alias.add(None, self.advance())
                            node.add(None, alias)
                    if self.at(","):
                        node.add(None, self.advance())
                    elif self.i == before or not self.at("}"):
                        break
                node.add(None, self.expect("}"))
            if self.at_word("from"):
                node.add(None, self.advance())
                node.flags["reexport"] = True
                if self.cur.kind == STRING:
                    node.add("source", self.literal())
            self.consume_semicolon(node)
            return node
        node.add("declaration", self.statement())
        return node

    # -- expressions ---------------------------------------------------------------

    def expression(self, no_in: bool = False) -> Node:
        first = self.assignment(no_in)
        if not self.at(","):
            return first
        node = Node("SequenceExpression")
        node.push("expressions", first)
        while self.at(",") and not self.panic:
            node.add(None, self.advance())
            node.push("expressions", self.assignment(no_in))
        return node

    def assignment(self, no_in: bool = False) -> Node:
        if self.depth > MAX_DEPTH:
            return self.too_deep()
        self.depth += 1
        try:
            if self._is_arrow_ahead():
                return self.arrow_function()
            left = self.conditional(no_in)
            if self.cur.kind == PUNCT and self.cur.text in ASSIGN_OPS:
                node = Node("AssignmentExpression")
                node.add("left", left)
                op = node.add(None, self.advance())
                node.flags["operator"] = op.text
                node.add("right", self.assignment(no_in))
                return node
            return left
        finally:
            self.depth -= 1

    def conditional(self, no_in: bool) -> Node:
        test = self.binary(0, no_in)
        if not self.at("?"):
            return test
        node = Node("ConditionalExpression")
        node.add("test", test)
        node.add(None, self.advance())
        node.add("consequent", self.assignment())
        node.add(None, self.expect(":"))
        node.add("alternate", self.assignment(no_in))
        return node

    def _binary_prec(self, no_in: bool) -> Optional[int]:
        tok = self.cur
        if tok.kind == PUNCT or (tok.kind == KEYWORD and tok.text in ("in", "instanceof")):
            if no_in and tok.text == "in":
                return None
            return BINARY_PREC.get(tok.text)
        return None

    def binary(self, min_prec: int, no_in: bool) -> Node:
        left = self.unary()
        while not self.panic:
            prec = self._binary_prec(no_in)
            if prec is None or prec < min_prec:
                break
            node = Node("BinaryExpression")
            node.add("left", left)
            op = node.add(None, self.advance())
            node.flags["operator"] = op.text
            node.add("right", self.binary(prec if op.text == "**" else prec + 1, no_in))
            left = node
        return left

    def unary(self) -> Node:
        tok = self.cur
        if (tok.kind == PUNCT and tok.text in UNARY_OPS) or (tok.kind == KEYWORD and tok.text in UNARY_KEYWORDS):
            node = Node("UpdateExpression" if tok.text in ("++", "--") else "UnaryExpression")
            op = node.add(None, self.advance())
            node.flags["operator"] = op.text
            node.add("argument", self.unary())
            return node
        if tok.kind == IDENTIFIER and tok.text == "await":
            nxt = self.peek()
            if not nxt.nl_before and self.can_start_expression(nxt) and not nxt.is_punct("+", "-"):
                node = Node("AwaitExpression")
                node.add(None, self.advance())
                node.add("argument", self.unary())
                return node
        expr = self.left_hand_side(allow_calls=True)
        if self.at("++", "--") and not self.cur.nl_before:
            node = Node("UpdateExpression")
            node.add("argument", expr)
            op = node.add(None, self.advance())
            node.flags["operator"] = op.text
            node.flags["postfix"] = True
            return node
        return expr

    def left_hand_side(self, allow_calls: bool = True) -> Node:
        if self.at_word("new"):
            expr = self.new_expression()
        else:
            expr = self.primary()
        while not self.panic:
            tok = self.cur
            if tok.is_punct("."):
                node = Node("MemberExpression")
                node.add("object", expr)
                node.add(None, self.advance())
                node.add("property", self.member_name())
            elif tok.is_punct("?."):
                node = Node("MemberExpression")
                node.flags["optional"] = True
                node.add("object", expr)
                node.add(None, self.advance())
                if self.at("("):
                    node.kind = "CallExpression"
                    node.fields["callee"] = node.fields.pop("object")
                    self.arguments(node)
                elif self.at("["):
                    self.computed_member(node)
                else:
                    node.add("property", self.member_name())
            elif tok.is_punct("["):
                node = Node("MemberExpression")
                node.add("object", expr)
                self.computed_member(node)
            elif tok.is_punct("(") and allow_calls:
                node = Node("CallExpression")
                node.add("callee", expr)
                self.arguments(node)
            elif tok.kind == TEMPLATE and tok.part in ("full", "head"):
                node = Node("TaggedTemplate")
                node.add("tag", expr)
                node.add("quasi", self.template())
            else:
                break
            expr = node
        return expr

    def member_name(self) -> Optional[Node]:
        tok = self.cur
        if tok.kind in (IDENTIFIER, KEYWORD):
            node = Node("PropertyName")
            node.add(None, self.advance())
            return node
        if tok.is_punct("#") and self.peek().kind in (IDENTIFIER, KEYWORD):
            node = Node("PropertyName")
            node.add(None, self.advance())
            node.add(None, self.advance())
            return node
        self.error(1003, tok)
        return None

    def computed_member(self, node: Node) -> None:
        node.flags["computed"] = True
        node.add(None, self.advance())
        node.add("index", self.expression())
        node.add(None, self.expect("]"))

    def arguments(self, node: Node) -> None:
        node.add(None, self.advance())  # '('
        while not self.at(")") and self.cur.kind != EOF and not self.panic:
            before = self.i
            if self.at("..."):
                spread = Node("SpreadElement")
                spread.add(None, self.advance())
                spread.add("argument", self.assignment())
                node.push("arguments", spread)
            else:
                node.push("arguments", self.assignment())
            if self.at(","):
                node.add(None, self.advance())
            elif self.i == before or not self.at(")"):
                break
        if self.at(")"):
            node.add(None, self.advance())
        elif self.can_start_expression() and not self.cur.nl_before:
            self.expect(",")
        else:
            self.expect(")")

    def new_expression(self) -> Node:
        node = Node("NewExpression")
        node.add(None, self.advance())
        if self.at("."):
            node.kind = "MetaProperty"
            node.add(None, self.advance())
            node.add("property", self.member_name())
            return node
        callee = self.left_hand_side(allow_calls=False)
        node.add("callee", callee)
        if self.at("("):
            self.arguments(node)
        return node

    def literal(self) -> Node:
        node = Node("Literal")
        leaf = node.add(None, self.advance())
        node.flags["type"] = leaf.token.kind if leaf.token.kind != KEYWORD else leaf.text
        return node

    def template(self) -> Node:
        node = Node("TemplateLiteral")
        head = node.add(None, self.advance())
        if head.token.part == "full":
            return node
        while True:
            node.push("expressions", self.expression())
            tok = self.cur
            if tok.kind == TEMPLATE and tok.part in ("middle", "tail"):
                node.add(None, self.advance())
                if tok.part == "tail":
                    return node
                continue
            self.expect("}")
            return node

    def primary(self) -> Node:
        tok = self.cur
        kind = tok.kind
        if kind == IDENTIFIER:
            if tok.text == "async" and self.peek().is_word("function") and not self.peek().nl_before:
                return self.function(Node("FunctionExpression"))
            node = Node("Identifier")
            node.add(None, self.advance())
            return node
        if kind in (NUMBER, STRING, REGEX):
            return self.literal()
        if kind == TEMPLATE and tok.part in ("full", "head"):
            return self.template()
        if kind == KEYWORD:
            if tok.text in ("null", "true", "false"):
                return self.literal()
            if tok.text in ("this", "super"):
                node = Node("ThisExpression" if tok.text == "this" else "Super")
                node.add(None, self.advance())
                return node
            if tok.text == "function":
                return self.function(Node("FunctionExpression"))
            if tok.text == "class":
                return self.class_declaration("ClassExpression")
            if tok.text == "import":
                node = Node("ImportExpression")
                node.add(None, self.advance())
                return node
            if tok.text == "new":
                return self.new_expression()
        if kind == PUNCT:
            if tok.text == "(":
                return self.parenthesized()
            if tok.text == "[":
                return self.array_literal()
            if tok.text == "{":
                return self.object_literal()
        self.error(codes.EXPRESSION_EXPECTED, tok)
        return self.missing()

    def parenthesized(self) -> Node:
        node = Node("ParenthesizedExpression")
        node.add(None, self.advance())
        node.add("expression", self.expression())
        node.add(None, self.expect(")"))
        return node

    def array_literal(self) -> Node:
        node = Node("ArrayExpression")
        node.add(None, self.advance())
        while not self.at("]") and self.cur.kind != EOF and not self.panic:
            if self.at(","):
                node.add(None, self.advance())
                continue
            before = self.i
            if self.at("..."):
                spread = Node("SpreadElement")
                spread.add(None, self.advance())
                spread.add("argument", self.assignment())
                node.push("elements", spread)
            else:
                node.push("elements", self.assignment())
            if self.at(","):
                node.add(None, self.advance())
            elif self.i == before or not self.at("]"):
                break
        node.add(None, self.expect("]"))
        return node

    def object_literal(self) -> Node:
        node = Node("ObjectExpression")
        node.add(None, self.advance())
        while not self.at("}") and self.cur.kind != EOF and not self.panic:
            before = self.i
            node.push("properties", self.object_member())
            if self.at(","):
                node.add(None, self.advance())
            elif self.i == before or not self.at("}"):
                break
        node.add(None, self.expect("}"))
        return node

    def object_member(self) -> Optional[Node]:
        if self.at("..."):
            spread = Node("SpreadElement")
            spread.add(None, self.advance())
            spread.add("argument", self.assignment())
            return spread
        prop = Node("Property")
        nxt = self.peek()
        if (
            self.at_word("get", "set", "async")
            and not nxt.is_punct(",", ":", "(", "}", "=")
            and not nxt.nl_before
        ) or self.at("*"):
            while self.at_word("get", "set", "async") or self.at("*"):
                modifier = prop.add(None, self.advance())
                if modifier.text == "async":
                    prop.flags["async"] = True
                if modifier.text == "*":
                    prop.flags["generator"] = True
            prop.add("key", self.property_name())
            return self._method(prop)
        if self.at_identifier() and nxt.is_punct(",", "}", "="):
            ref = Node("Identifier")
            ref.add(None, self.advance())
            prop.flags["shorthand"] = True
            if self.at("="):
                pattern = Node("AssignmentPattern")
                pattern.add("target", ref)
                pattern.add(None, self.advance())
                pattern.add("default", self.assignment())
                ref = pattern
            prop.add("value", ref)
            return prop
        prop.add("key", self.property_name())
        if self.at(":"):
            prop.add(None, self.advance())
            prop.add("value", self.assignment())
        elif self.at("("):
            return self._method(prop)
        else:
            self.error(codes.EXPECTED, self.cur, ":")
        return prop

    def _method(self, prop: Node) -> Node:
        func = Node("FunctionExpression")
        func.flags.update({k: v for k, v in prop.flags.items() if k in ("async", "generator")})
        func.flags["method"] = True
        self.parameters(func)
        if func.flags.get("generator"):
            func.add("body", self.opaque_body())
        else:
            func.add("body", self.block("FunctionBody"))
        prop.add("value", func)
        return prop


def parse_tokens(text: str, deadline: Optional[float] = None) -> tuple[SyntaxTree, list[tuple[int, int, int, tuple]]]:
    """Parse ``text`` into a tree plus raw ``(code, start, length, args)`` problems."""
    with deep_recursion():
        parser = Parser(text, deadline)
        root = parser.parse_program()
    raw = [(code, start, length, ()) for code, start, length in lexical_errors(parser.tokens)]
    raw.extend(parser.diags)
    tree = SyntaxTree(root=root, tokens=parser.tokens, text=text, closer_hints=parser.hints)
    return tree, raw


def parse(text: str, deadline: Optional[float] = None) -> tuple[SyntaxTree, list[Diagnostic]]:
    tree, raw = parse_tokens(text, deadline)
    snippet = Snippet.from_text(text) if "\r\n" not in text else Snippet(id="<inline>", text=text)
    diags = [codes.make_diagnostic(code, start, length, snippet, *args) for code, start, length, args in raw]
    diags.sort(key=lambda d: d.sort_key)
    return tree, diags

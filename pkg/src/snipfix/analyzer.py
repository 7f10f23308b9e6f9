"""Scope construction, name resolution and semantic diagnostics.

The analyzer models a CommonJS script: ``require`` is the only way to load a
module, ``import``/``export`` are rejected and top-level ``await`` is an
error.  Types are tracked only where they are certain (literals, builtin
modules and a handful of ambient globals); every other value is unknown and
never produces a property diagnostic.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional, Union

from . import codes
from .lexer import AnalysisTimeout, STRING, check_deadline, string_value
from .parser import Leaf, Node, SyntaxTree, deep_recursion, parse_tokens
from .source import Diagnostic, Snippet, Span

FUNCTION_KINDS = frozenset({"FunctionDeclaration", "FunctionExpression", "ArrowFunction"})
MIN_SUGGESTION_LENGTH = 3
AMBIENT_SCHEMA = "snipfix-ambient/1"

__all__ = [
    "AmbientEnvironment",
    "AnalysisTimeout",
    "CheckResult",
    "Reference",
    "Scope",
    "ScopeTable",
    "Symbol",
    "TypeHint",
    "check",
    "expected_type_at",
    "name_suggestion",
    "osa_distance",
]


# -- ambient environment ------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    params: tuple[str, ...] = ()
    rest: Optional[str] = None

    def param(self, index: int) -> Optional[str]:
        if index < len(self.params):
            return self.params[index]
        return self.rest

    @classmethod
    def from_json(cls, data) -> Optional["Signature"]:
        if not data or ("params" not in data and "rest" not in data):
            return None
        return cls(tuple(data.get("params", ())), data.get("rest"))


@dataclass(frozen=True)
class TypeInfo:
    name: str
    complete: bool
    members: dict[str, Optional[Signature]]


@dataclass(frozen=True, eq=False)
class AmbientEnvironment:
    """Globally visible names and builtin modules of a Node.js script."""

    globals: frozenset[str]
    global_types: dict[str, str]
    global_signatures: dict[str, Signature]
    types: dict[str, TypeInfo]
    modules: frozenset[str]

    @classmethod
    def from_json(cls, data: dict) -> "AmbientEnvironment":
        if data.get("schema") != AMBIENT_SCHEMA:
            raise ValueError(f"not a {AMBIENT_SCHEMA} document (schema={data.get('schema')!r})")
        types: dict[str, TypeInfo] = {}
        for name, entry in data.get("types", {}).items():
            types[name] = _type_info(name, entry)
        for name, entry in data.get("modules", {}).items():
            types[module_type(name)] = _type_info(name, entry)
        global_types, global_signatures = {}, {}
        for name, entry in data.get("globals", {}).items():
            entry = entry or {}
            if entry.get("type"):
                global_types[name] = entry["type"]
            sig = Signature.from_json(entry)
            if sig is not None:
                global_signatures[name] = sig
        return cls(
            globals=frozenset(data.get("globals", {})),
            global_types=global_types,
            global_signatures=global_signatures,
            types=types,
            modules=frozenset(data.get("modules", {})),
        )

    @classmethod
    def load(cls, path=None) -> "AmbientEnvironment":
        if path is None:
            return default_environment()
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def is_builtin_module(self, name: str) -> bool:
        return _strip_node_prefix(name) in self.modules

    def module_type(self, name: str) -> Optional[str]:
        name = _strip_node_prefix(name)
        return module_type(name) if name in self.modules else None

    def member(self, type_name: Optional[str], member: str):
        """``(known, signature)`` for ``member`` of ``type_name``.

        ``known`` is False only when the type is complete and lacks the member.
        """
        info = self.types.get(type_name) if type_name else None
        if info is None:
            return True, None
        if member in info.members:
            return True, info.members[member]
        return not info.complete, None

    def display_type(self, type_name: str) -> str:
        if type_name.startswith("module:"):
            return f'typeof import("{type_name[7:]}")'
        return {"array": "any[]"}.get(type_name, type_name)


def module_type(name: str) -> str:
    return f"module:{name}"


def _strip_node_prefix(name: str) -> str:
    return name[5:] if name.startswith("node:") else name


def _type_info(name: str, entry: dict) -> TypeInfo:
    members = {m: Signature.from_json(sig) for m, sig in entry.get("members", {}).items()}
    return TypeInfo(name=name, complete=bool(entry.get("complete")), members=members)


@lru_cache(maxsize=1)
def default_environment() -> AmbientEnvironment:
    text = resources.files("snipfix").joinpath("data/ambient.json").read_text(encoding="utf-8")
    return AmbientEnvironment.from_json(json.loads(text))


# -- type hints --------------------------------------------------------------------


class HintKind(str, Enum):
    STRING = "string"
    NUMBER = "number"
    STRING_ARRAY = "string-array"
    NUMBER_ARRAY = "number-array"
    CALLABLE = "callable"
    CONSTRUCTABLE = "constructable"
    COMPLEX = "complex"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TypeHint:
    kind: HintKind
    description: Optional[str] = None

    @classmethod
    def from_annotation(cls, text: Optional[str]) -> "TypeHint":
        if text is None:
            return UNKNOWN_HINT
        text = text.strip()
        simple = {
            "string": HintKind.STRING,
            "number": HintKind.NUMBER,
            "string[]": HintKind.STRING_ARRAY,
            "number[]": HintKind.NUMBER_ARRAY,
            "Function": HintKind.CALLABLE,
            "Constructor": HintKind.CONSTRUCTABLE,
        }
        if text in simple:
            return cls(simple[text])
        if text in ("any", "unknown", ""):
            return UNKNOWN_HINT
        return cls(HintKind.COMPLEX, text)

    def describe(self) -> str:
        if self.description:
            return self.description
        return {
            HintKind.STRING_ARRAY: "string[]",
            HintKind.NUMBER_ARRAY: "number[]",
            HintKind.CALLABLE: "Function",
            HintKind.CONSTRUCTABLE: "Constructor",
        }.get(self.kind, self.kind.value)


UNKNOWN_HINT = TypeHint(HintKind.UNKNOWN)


# -- scopes ---------------------------------------------------------------------------


@dataclass(eq=False)
class Symbol:
    name: str
    kind: str  # var, let, const, function, class, param, catch, import, self
    span: Span
    type: Optional[str] = None
    reassigned: bool = False

    @property
    def value_type(self) -> Optional[str]:
        return None if self.reassigned else self.type


@dataclass(eq=False)
class Scope:
    kind: str  # global, function, block, catch
    parent: Optional["Scope"]
    node: Optional[Node] = None
    symbols: dict[str, Symbol] = field(default_factory=dict)
    is_arrow: bool = False
    is_async: bool = False

    def lookup(self, name: str) -> Optional[Symbol]:
        scope: Optional[Scope] = self
        while scope is not None:
            sym = scope.symbols.get(name)
            if sym is not None:
                return sym
            scope = scope.parent
        return None

    def function_scope(self) -> Optional["Scope"]:
        scope: Optional[Scope] = self
        while scope is not None and scope.kind not in ("function", "global"):
            scope = scope.parent
        return scope if scope is not None and scope.kind == "function" else None

    def visible_names(self) -> set[str]:
        names: set[str] = set()
        scope: Optional[Scope] = self
        while scope is not None:
            names.update(scope.symbols)
            scope = scope.parent
        return names


@dataclass(eq=False)
class Reference:
    name: str
    span: Span
    node: Node
    scope: Scope
    symbol: Optional[Symbol]  # None: unresolved; ambient globals resolve to AMBIENT

    @property
    def resolved(self) -> bool:
        return self.symbol is not None


AMBIENT = Symbol(name="<ambient>", kind="ambient", span=Span(0, 0))


@dataclass
class ScopeTable:
    scopes: list[Scope]
    references: list[Reference]
    non_references: int = 0
    _by_start: Optional[dict[int, Reference]] = field(default=None, repr=False)

    @property
    def global_scope(self) -> Scope:
        return self.scopes[0]

    def unresolved(self) -> list[Reference]:
        return [r for r in self.references if not r.resolved]

    def reference_at(self, start: int) -> Optional[Reference]:
        if self._by_start is None:
            self._by_start = {ref.span.start: ref for ref in self.references}
        return self._by_start.get(start)


@dataclass
class CheckResult:
    snippet: Snippet
    diagnostics: list[Diagnostic]
    tree: Optional[SyntaxTree]
    scopes: Optional[ScopeTable]
    env: Optional[AmbientEnvironment] = None

    @property
    def count(self) -> int:
        return len(self.diagnostics)


# -- edit distance and suggestions ----------------------------------------------------


def osa_distance(a: str, b: str, limit: int = 2) -> int:
    """Optimal-string-alignment distance (adjacent transpositions count as one edit).

    Returns ``limit`` early once the distance is known to be at least ``limit``.
    """
    if abs(len(a) - len(b)) >= limit:
        return limit
    prev2: list[int] = []
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        if min(cur) >= limit:
            return limit
        prev2, prev = prev, cur
    return min(prev[-1], limit)


def name_suggestion(
    name: str, scope: Optional[Scope], env: Optional[AmbientEnvironment] = None
) -> Optional[str]:
    """The unique visible or ambient name within one edit of ``name``, if any."""
    env = env or default_environment()
    if len(name) < MIN_SUGGESTION_LENGTH:
        return None
    candidates = set(env.globals)
    if scope is not None:
        candidates |= scope.visible_names()
    candidates.discard(name)
    close = [c for c in candidates if len(c) >= MIN_SUGGESTION_LENGTH and osa_distance(name, c) <= 1]
    return close[0] if len(close) == 1 else None


def _deletes(word: str) -> set[str]:
    return {word[:i] + word[i + 1:] for i in range(len(word))}


class _SuggestionIndex:
    """Finds names within one edit quickly: any two such names share a one-deletion key."""

    def __init__(self, names: Iterable[str]):
        self.keys: dict[str, set[str]] = {}
        for name in names:
            self.add(name)

    def add(self, name: str) -> None:
        if len(name) < MIN_SUGGESTION_LENGTH:
            return
        for key in _deletes(name) | {name}:
            self.keys.setdefault(key, set()).add(name)

    def near(self, name: str) -> set[str]:
        found: set[str] = set()
        for key in _deletes(name) | {name}:
            found |= self.keys.get(key, set())
        found.discard(name)
        return {c for c in found if osa_distance(name, c) <= 1}


@lru_cache(maxsize=4)
def _ambient_index(env: AmbientEnvironment) -> _SuggestionIndex:
    return _SuggestionIndex(env.globals)


def _fast_suggestion(name: str, scope: Scope, env: AmbientEnvironment, local: _SuggestionIndex) -> Optional[str]:
    """Same answer as :func:`name_suggestion`, using prebuilt indexes."""
    if len(name) < MIN_SUGGESTION_LENGTH:
        return None
    close = _ambient_index(env).near(name)
    close |= {c for c in local.near(name) if scope.lookup(c) is not None}
    return next(iter(close)) if len(close) == 1 else None


# -- the binder -------------------------------------------------------------------------


def _binding_names(target) -> Iterable[Node]:
    """BindingIdentifier nodes declared by a binding pattern."""
    if target is None or isinstance(target, Leaf):
        return
    stack = [target]
    while stack:
        node = stack.pop()
        if node.kind == "BindingIdentifier":
            yield node
            continue
        if node.kind in ("AssignmentPattern",):
            stack.append(node.get("target"))
        elif node.kind == "RestElement":
            stack.append(node.get("argument"))
        elif node.kind == "ArrayPattern":
            stack.extend(reversed(node.items("elements")))
        elif node.kind == "ObjectPattern":
            stack.extend(reversed(node.items("properties")))
        elif node.kind == "BindingProperty":
            stack.append(node.get("value"))
        stack = [n for n in stack if n is not None]


def _leaf_text(node: Node) -> str:
    leaf = next(node.leaves(), None)
    return leaf.token.text if leaf else ""


def _leaf_span(node: Node) -> Span:
    leaf = next(node.leaves(), None)
    if leaf is None:
        return Span(node.start, 0)
    return Span(leaf.start, leaf.end - leaf.start)


def _keyword_span(node: Node) -> Span:
    return _leaf_span(node)


def _unparen(node):
    while isinstance(node, Node) and node.kind == "ParenthesizedExpression":
        node = node.get("expression")
    return node


class _Binder:
    def __init__(self, tree: SyntaxTree, env: AmbientEnvironment, deadline: Optional[float],
                 suppress_missing_module: bool):
        self.tree = tree
        self.env = env
        self.deadline = deadline
        self.suppress_missing_module = suppress_missing_module
        self.scopes: list[Scope] = []
        self.references: list[Reference] = []
        self.problems: list[tuple[int, Span, tuple[str, ...]]] = []
        # deferred until the walk has seen every reassignment
        self.member_checks: list[tuple[Node, Scope]] = []
        self.invocable_checks: list[tuple[Node, Scope, int]] = []
        self.non_references = 0
        self.steps = 0

    def new_scope(self, kind: str, parent: Optional[Scope], node: Optional[Node] = None, **kw) -> Scope:
        scope = Scope(kind, parent, node, **kw)
        self.scopes.append(scope)
        return scope

    def declare(self, scope: Scope, ident: Node, kind: str, type_name: Optional[str] = None) -> None:
        name = _leaf_text(ident)
        existing = scope.symbols.get(name)
        if existing is not None:
            # a second declaration of the same name makes the type uncertain
            if existing.type != type_name or kind != "var" or existing.kind != "var":
                existing.reassigned = True
            return
        scope.symbols[name] = Symbol(name, kind, _leaf_span(ident), type_name)

    # -- declaration passes -----------------------------------------------------------

    def hoist(self, body: Iterable, fscope: Scope) -> None:
        """Declare var and function declarations found anywhere outside nested functions."""
        stack = [n for n in body if isinstance(n, Node)]
        while stack:
            node = stack.pop()
            kind = node.kind
            if kind == "VariableDeclaration":
                if node.flags.get("declaration_kind") == "var":
                    for decl in node.items("declarations"):
                        type_name = self.initializer_type(decl.get("init"))
                        targets = list(_binding_names(decl.get("id")))
                        for ident in targets:
                            self.declare(fscope, ident, "var", type_name if len(targets) == 1 else None)
                stack.extend(c for c in node.children if isinstance(c, Node))
                continue
            if kind == "FunctionDeclaration":
                name = node.get("name")
                if name is not None:
                    self.declare(fscope, name, "function")
                continue
            if kind in FUNCTION_KINDS or kind in ("ClassDeclaration", "ClassExpression", "OpaqueBody"):
                continue
            stack.extend(c for c in node.children if isinstance(c, Node))

    def declare_lexical(self, statements: Iterable, scope: Scope) -> None:
        for stmt in statements:
            if not isinstance(stmt, Node):
                continue
            if stmt.kind == "ExportDeclaration" and stmt.get("declaration") is not None:
                stmt = stmt.get("declaration")
            if stmt.kind == "VariableDeclaration" and stmt.flags.get("declaration_kind") in ("let", "const"):
                kind = stmt.flags["declaration_kind"]
                for decl in stmt.items("declarations"):
                    type_name = self.initializer_type(decl.get("init"))
                    targets = list(_binding_names(decl.get("id")))
                    for ident in targets:
                        self.declare(scope, ident, kind, type_name if len(targets) == 1 else None)
            elif stmt.kind == "ClassDeclaration" and stmt.get("name") is not None:
                self.declare(scope, stmt.get("name"), "class")
            elif stmt.kind == "ImportDeclaration":
                for spec in stmt.items("specifiers"):
                    self.declare(scope, spec, "import")

    def initializer_type(self, init) -> Optional[str]:
        init = _unparen(init)
        if not isinstance(init, Node):
            return None
        if init.kind == "Literal":
            return {STRING: "string", "number": "number"}.get(init.flags.get("type"))
        if init.kind == "TemplateLiteral":
            return "string"
        if init.kind == "ArrayExpression":
            return "array"
        module = self.required_module(init)
        if module is not None:
            return self.env.module_type(module)
        return None

    @staticmethod
    def required_module(node) -> Optional[str]:
        """Module name of a ``require("x")`` call, else None."""
        if not isinstance(node, Node) or node.kind != "CallExpression":
            return None
        callee = node.get("callee")
        args = node.items("arguments")
        if not (isinstance(callee, Node) and callee.kind == "Identifier" and _leaf_text(callee) == "require"):
            return None
        if len(args) != 1 or args[0].kind != "Literal":
            return None
        return string_value(next(args[0].leaves()).token)

    # -- walking ---------------------------------------------------------------------------

    def run(self) -> ScopeTable:
        root = self.tree.root
        scope = self.new_scope("global", None, root)
        body = root.items("body")
        self.hoist(body, scope)
        self.declare_lexical(body, scope)
        for stmt in body:
            self.visit(stmt, scope)
        self.check_members()
        return ScopeTable(self.scopes, self.references, self.non_references)

    def visit(self, node, scope: Scope) -> None:
        if not isinstance(node, Node):
            return
        self.steps += 1
        if self.steps % 256 == 0:
            check_deadline(self.deadline)
        handler = getattr(self, "visit_" + node.kind, None)
        if handler is not None:
            handler(node, scope)
        else:
            self.visit_children(node, scope)

    def visit_children(self, node: Node, scope: Scope) -> None:
        for child in node.children:
            if isinstance(child, Node):
                self.visit(child, scope)

    # references and non-references

    def visit_Identifier(self, node: Node, scope: Scope) -> None:
        name = _leaf_text(node)
        symbol = scope.lookup(name)
        if symbol is None and self.is_ambient(name, scope):
            symbol = AMBIENT
        self.references.append(Reference(name, _leaf_span(node), node, scope, symbol))

    def is_ambient(self, name: str, scope: Scope) -> bool:
        if name in self.env.globals:
            return True
        if name == "arguments":
            current: Optional[Scope] = scope
            while current is not None:
                if current.kind == "function" and not current.is_arrow:
                    return True
                current = current.parent
        return False

    def visit_PropertyName(self, node: Node, scope: Scope) -> None:
        self.non_references += 1

    visit_Label = visit_PropertyName
    visit_ExportSpecifier = visit_PropertyName

    def visit_BindingIdentifier(self, node: Node, scope: Scope) -> None:
        self.non_references += 1

    def visit_OpaqueBody(self, node: Node, scope: Scope) -> None:
        return None

    def visit_Error(self, node: Node, scope: Scope) -> None:
        self.visit_children(node, scope)

    # patterns: only defaults and computed keys hold references

    def visit_pattern(self, target, scope: Scope) -> None:
        if not isinstance(target, Node):
            return
        for node in target.walk():
            if node.kind == "AssignmentPattern":
                self.visit(node.get("default"), scope)
            elif node.kind == "ComputedName":
                self.visit(node.get("expression"), scope)

    def visit_VariableDeclarator(self, node: Node, scope: Scope) -> None:
        self.visit_pattern(node.get("id"), scope)
        self.visit(node.get("init"), scope)

    def mark_assigned(self, target, scope: Scope) -> None:
        target = _unparen(target)
        if isinstance(target, Node) and target.kind == "Identifier":
            symbol = scope.lookup(_leaf_text(target))
            if symbol is not None:
                symbol.reassigned = True

    def visit_AssignmentExpression(self, node: Node, scope: Scope) -> None:
        left = node.get("left")
        self.mark_assigned(left, scope)
        if isinstance(left, Node) and left.kind in ("ArrayExpression", "ObjectExpression"):
            for sub in left.walk():
                if sub.kind == "Identifier":
                    self.mark_assigned(sub, scope)
        self.visit_children(node, scope)

    def visit_UpdateExpression(self, node: Node, scope: Scope) -> None:
        self.mark_assigned(node.get("argument"), scope)
        self.visit_children(node, scope)

    def visit_MemberExpression(self, node: Node, scope: Scope) -> None:
        self.visit(node.get("object"), scope)
        if node.flags.get("computed"):
            self.visit(node.get("index"), scope)
        elif node.get("property") is not None:
            self.non_references += 1
            self.member_checks.append((node, scope))

    # functions

    def visit_function(self, node: Node, scope: Scope) -> None:
        outer = scope
        name = node.get("name")
        if node.kind == "FunctionExpression" and name is not None:
            outer = self.new_scope("block", scope, node)
            self.declare(outer, name, "self")
        fscope = self.new_scope(
            "function", outer, node,
            is_arrow=node.kind == "ArrowFunction",
            is_async=bool(node.flags.get("async")),
        )
        params = node.items("params")
        for param in params:
            for ident in _binding_names(param):
                self.declare(fscope, ident, "param")
        for param in params:
            self.visit_pattern(param, fscope)
        body = node.get("body")
        if isinstance(body, Node) and body.kind == "FunctionBody":
            statements = body.items("body")
            self.hoist(statements, fscope)
            self.declare_lexical(statements, fscope)
            for stmt in statements:
                self.visit(stmt, fscope)
        else:
            self.visit(body, fscope)

    visit_FunctionDeclaration = visit_function
    visit_FunctionExpression = visit_function
    visit_ArrowFunction = visit_function

    def visit_ClassDeclaration(self, node: Node, scope: Scope) -> None:
        self.visit(node.get("superclass"), scope)

    visit_ClassExpression = visit_ClassDeclaration

    # blocks

    def visit_Block(self, node: Node, scope: Scope) -> None:
        inner = self.new_scope("block", scope, node)
        statements = node.items("body")
        self.declare_lexical(statements, inner)
        for stmt in statements:
            self.visit(stmt, inner)

    def visit_for(self, node: Node, scope: Scope) -> None:
        inner = self.new_scope("block", scope, node)
        head = node.get("init") or node.get("left")
        if isinstance(head, Node) and head.kind == "VariableDeclaration":
            self.declare_lexical([head], inner)
        if node.flags.get("await"):
            self.check_await(node, scope)
        for child in node.children:
            if isinstance(child, Node):
                self.visit(child, inner)

    visit_ForStatement = visit_for
    visit_ForInStatement = visit_for
    visit_ForOfStatement = visit_for

    def visit_SwitchStatement(self, node: Node, scope: Scope) -> None:
        self.visit(node.get("discriminant"), scope)
        inner = self.new_scope("block", scope, node)
        cases = node.items("cases")
        for case in cases:
            self.declare_lexical(case.items("body"), inner)
        for case in cases:
            self.visit(case.get("test"), inner)
            for stmt in case.items("body"):
                self.visit(stmt, inner)

    def visit_CatchClause(self, node: Node, scope: Scope) -> None:
        inner = self.new_scope("catch", scope, node)
        param = node.get("param")
        for ident in _binding_names(param):
            self.declare(inner, ident, "catch")
        self.visit_pattern(param, inner)
        self.visit(node.get("body"), inner)

    # script-mode rules

    def visit_ReturnStatement(self, node: Node, scope: Scope) -> None:
        if scope.function_scope() is None:
            self.problems.append((codes.RETURN_OUTSIDE_FUNCTION, _keyword_span(node), ()))
        self.visit_children(node, scope)

    def check_await(self, node: Node, scope: Scope) -> None:
        fscope = scope.function_scope()
        span = _keyword_span(node) if node.kind == "AwaitExpression" else _await_span(node)
        if fscope is None:
            self.problems.append((codes.TOP_LEVEL_AWAIT, span, ()))
        elif not fscope.is_async:
            self.problems.append((codes.AWAIT_OUTSIDE_ASYNC, span, ()))

    def visit_AwaitExpression(self, node: Node, scope: Scope) -> None:
        self.check_await(node, scope)
        self.visit_children(node, scope)

    def visit_ImportDeclaration(self, node: Node, scope: Scope) -> None:
        self.problems.append((9002, _keyword_span(node), ()))

    def visit_ExportDeclaration(self, node: Node, scope: Scope) -> None:
        self.problems.append((9003, _keyword_span(node), ()))
        self.visit_children(node, scope)

    def check_invocable(self, node: Node, scope: Scope, code: int) -> None:
        self.invocable_checks.append((node.get("callee"), scope, code))

    def visit_NewExpression(self, node: Node, scope: Scope) -> None:
        self.check_invocable(node, scope, codes.NOT_CONSTRUCTABLE)
        self.visit_children(node, scope)

    def visit_CallExpression(self, node: Node, scope: Scope) -> None:
        if isinstance(node.get("callee"), Node):
            self.check_invocable(node, scope, codes.NOT_CALLABLE)
        module = self.required_module(node)
        if module is not None and not self.suppress_missing_module and not self.env.is_builtin_module(module):
            arg = node.items("arguments")[0]
            self.problems.append((codes.CANNOT_FIND_MODULE, _leaf_span(arg), (module,)))
        self.visit_children(node, scope)

    # property existence

    def value_type(self, node, scope: Scope) -> Optional[str]:
        node = _unparen(node)
        if not isinstance(node, Node):
            return None
        if node.kind == "Identifier":
            name = _leaf_text(node)
            symbol = scope.lookup(name)
            if symbol is not None:
                return symbol.value_type
            return self.env.global_types.get(name)
        if node.kind == "Literal":
            return {STRING: "string", "number": "number"}.get(node.flags.get("type"))
        if node.kind == "TemplateLiteral":
            return "string"
        if node.kind == "ArrayExpression":
            return "array"
        return None

    def check_members(self) -> None:
        for callee, scope, code in self.invocable_checks:
            if self.value_type(callee, scope) in ("string", "number", "array"):
                self.problems.append((code, Span(callee.start, callee.end - callee.start), ()))
        for node, scope in self.member_checks:
            type_name = self.value_type(node.get("object"), scope)
            if type_name is None:
                continue
            prop = node.get("property")
            name = "".join(leaf.text for leaf in prop.leaves())
            known, _ = self.env.member(type_name, name)
            if not known:
                self.problems.append((
                    codes.PROPERTY_DOES_NOT_EXIST, _leaf_span(prop), (name, self.env.display_type(type_name)),
                ))


def _await_span(node: Node) -> Span:
    for leaf in node.leaves():
        if leaf.text == "await":
            return Span(leaf.start, leaf.end - leaf.start)
    return _leaf_span(node)


# -- public entry points ---------------------------------------------------------------------


def check(
    snippet: Union[Snippet, str],
    env: Optional[AmbientEnvironment] = None,
    deadline: Optional[float] = None,
    *,
    timeout: Optional[float] = None,
    suppress_missing_module: bool = True,
) -> CheckResult:
    """Parse and analyze ``snippet``; diagnostics are sorted by (start, code).

    Raises :class:`AnalysisTimeout` when ``deadline`` (a ``time.monotonic``
    value) or ``timeout`` seconds pass before analysis completes.
    """
    if isinstance(snippet, str):
        snippet = Snippet.from_text(snippet)
    env = env or default_environment()
    if timeout is not None:
        limit = time.monotonic() + timeout
        deadline = limit if deadline is None else min(deadline, limit)
    tree, raw = parse_tokens(snippet.text, deadline)
    binder = _Binder(tree, env, deadline, suppress_missing_module)
    with deep_recursion():
        scopes = binder.run()
    diagnostics = [
        codes.make_diagnostic(code, start, length, snippet, *args) for code, start, length, args in raw
    ]
    for code, span, args in binder.problems:
        diagnostics.append(codes.make_diagnostic(code, span.start, span.length, snippet, *args))
    local_index = _SuggestionIndex(name for scope in scopes.scopes for name in scope.symbols)
    for n, ref in enumerate(scopes.unresolved()):
        if n % 64 == 0:
            check_deadline(deadline)
        suggestion = _fast_suggestion(ref.name, ref.scope, env, local_index)
        if suggestion is None:
            diagnostics.append(
                codes.make_diagnostic(codes.CANNOT_FIND_NAME, ref.span.start, ref.span.length, snippet, ref.name)
            )
        else:
            diagnostics.append(codes.make_diagnostic(
                codes.CANNOT_FIND_NAME_SUGGESTION, ref.span.start, ref.span.length, snippet, ref.name, suggestion,
            ))
    diagnostics.sort(key=lambda d: d.sort_key)
    return CheckResult(snippet, diagnostics, tree, scopes, env)


def suggestion_of(diagnostic: Diagnostic) -> Optional[str]:
    """The suggested name carried by a 2552 diagnostic."""
    if diagnostic.code != codes.CANNOT_FIND_NAME_SUGGESTION:
        return None
    marker = "Did you mean '"
    idx = diagnostic.message.rfind(marker)
    return diagnostic.message[idx + len(marker):-2] if idx >= 0 else None


def expected_type_at(
    use_site: Union[Reference, Node],
    tree: Optional[SyntaxTree] = None,
    env: Optional[AmbientEnvironment] = None,
    scopes: Optional[ScopeTable] = None,
) -> TypeHint:
    """Parameter type hint for an identifier used as a call argument.

    Only callees whose signature the ambient environment knows contribute:
    members of builtin modules, members of typed globals and global functions.
    """
    env = env or default_environment()
    if isinstance(use_site, Reference):
        node, scope = use_site.node, use_site.scope
    else:
        node = use_site
        ref = scopes.reference_at(node.start) if scopes else None
        scope = ref.scope if ref else None
    arg = node
    parent = arg.parent
    while isinstance(parent, Node) and parent.kind == "ParenthesizedExpression":
        arg, parent = parent, parent.parent
    if not isinstance(parent, Node) or parent.kind not in ("CallExpression", "NewExpression"):
        return UNKNOWN_HINT
    args = parent.items("arguments")
    if arg not in args:
        return UNKNOWN_HINT
    index = args.index(arg)
    callee = _unparen(parent.get("callee"))
    signature = _callee_signature(callee, scope, env)
    if signature is None:
        return UNKNOWN_HINT
    return TypeHint.from_annotation(signature.param(index))


def _callee_signature(callee, scope: Optional[Scope], env: AmbientEnvironment) -> Optional[Signature]:
    if not isinstance(callee, Node):
        return None
    if callee.kind == "Identifier":
        name = _leaf_text(callee)
        if scope is not None and scope.lookup(name) is not None:
            return None
        return env.global_signatures.get(name)
    if callee.kind != "MemberExpression" or callee.flags.get("computed"):
        return None
    base = _unparen(callee.get("object"))
    prop = callee.get("property")
    if not isinstance(base, Node) or prop is None:
        return None
    type_name = None
    if base.kind == "Identifier":
        name = _leaf_text(base)
        symbol = scope.lookup(name) if scope is not None else None
        type_name = symbol.value_type if symbol is not None else env.global_types.get(name)
    elif base.kind == "Literal":
        type_name = {STRING: "string", "number": "number"}.get(base.flags.get("type"))
    if type_name is None:
        return None
    _, signature = env.member(type_name, _leaf_text(prop))
    return signature

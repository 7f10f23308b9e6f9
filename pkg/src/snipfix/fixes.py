"""Targeted fixes for undeclared names, the codefix registry and batch edits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import codes
from .analyzer import (
    AmbientEnvironment,
    CheckResult,
    HintKind,
    Reference,
    TypeHint,
    default_environment,
    expected_type_at,
    suggestion_of,
)
from .parser import Node, SyntaxTree
from .source import (
    Diagnostic,
    FixAction,
    Snippet,
    Span,
    TextChange,
    UsageError,
    apply_changes,
    byte_length,
)

CheckFn = Callable[[Snippet], CheckResult]
# a codefix factory receives the diagnostic and the check result it came from
CodefixFactory = Callable[[Diagnostic, CheckResult], list[FixAction]]

# same-line codes that mark a line as not really code
BLOCKING_CODES = frozenset({codes.EXPRESSION_EXPECTED, codes.UNEXPECTED_KEYWORD_OR_IDENTIFIER})


@dataclass(frozen=True)
class FixStyle:
    placeholder: str = "YOUR VALUE HERE"
    declaration_keyword: str = "var"
    require_keyword: str = "const"
    quote: str = '"'
    comment_prefix: str = "Suggested Type: "

    def string_literal(self, value: str) -> str:
        escaped = value.replace("\\", "\\\\").replace(self.quote, "\\" + self.quote)
        return f"{self.quote}{escaped}{self.quote}"

    def require_line(self, module: str) -> str:
        return f"{self.require_keyword} {module} = require({self.string_literal(module)});\n"

    def placeholder_value(self, hint: TypeHint) -> str:
        text = self.string_literal(self.placeholder)
        return {
            HintKind.NUMBER: "0",
            HintKind.STRING_ARRAY: f"[{text}]",
            HintKind.NUMBER_ARRAY: "[0]",
        }.get(hint.kind, text)

    def needs_comment(self, hint: TypeHint) -> bool:
        return hint.kind in (HintKind.COMPLEX, HintKind.CALLABLE, HintKind.CONSTRUCTABLE)


@dataclass
class SkippedFix:
    diagnostic: Diagnostic
    reason: str
    action: Optional[FixAction] = None

    def to_dict(self) -> dict:
        out = {"diagnostic": self.diagnostic.to_dict(), "reason": self.reason}
        if self.action is not None:
            out["action"] = self.action.to_dict()
        return out


@dataclass
class FixOutcome:
    applied: list[FixAction]
    skipped: list[SkippedFix]
    text_after: str
    diagnostics_after: list[Diagnostic]
    result: Optional[CheckResult] = field(default=None, repr=False)
    compile_count: int = 0


# -- targeted fixes ----------------------------------------------------------------------


def _direct_parent(node: Node) -> tuple[Node, Optional[Node]]:
    child, parent = node, node.parent
    while isinstance(parent, Node) and parent.kind == "ParenthesizedExpression":
        child, parent = parent, parent.parent
    return child, parent


def is_member_base(ref: Reference) -> bool:
    child, parent = _direct_parent(ref.node)
    return (
        isinstance(parent, Node)
        and parent.kind == "MemberExpression"
        and parent.get("object") is child
    )


def is_direct_call(ref: Reference) -> bool:
    child, parent = _direct_parent(ref.node)
    return isinstance(parent, Node) and parent.kind == "CallExpression" and parent.get("callee") is child


def top_level_statement(node: Node) -> Node:
    while node.parent is not None and node.parent.kind != "Program":
        node = node.parent
    return node


def _shebang_end(text: str) -> int:
    if not text.startswith("#!"):
        return 0
    nl = text.find("\n")
    return byte_length(text) if nl < 0 else byte_length(text[: nl + 1])


def placeholder_change(ref: Reference, snippet: Snippet, hint: TypeHint, style: FixStyle) -> TextChange:
    """Declaration of ``ref.name`` inserted just before its top-level statement."""
    stmt = top_level_statement(ref.node)
    start = stmt.start
    line = snippet.line_at_offset(start)
    line_start = snippet.line_index[line - 1].start
    prefix = snippet.text.encode("utf-8")[line_start:start].decode("utf-8")
    declaration = f"{style.declaration_keyword} {ref.name} = {style.placeholder_value(hint)};"
    note = f"{style.comment_prefix}{hint.describe()}" if style.needs_comment(hint) else None
    if prefix.strip() == "":
        text = declaration + (f" // {note}" if note else "") + "\n"
        return TextChange(Span(line_start, 0), text)
    text = declaration + (f" /* {note} */" if note else "") + " "
    return TextChange(Span(start, 0), text)


def targeted_fixes(
    snippet: Snippet,
    diagnostics: Optional[Sequence[Diagnostic]] = None,
    tree: Optional[SyntaxTree] = None,
    scopes=None,
    *,
    check_fn: Optional[CheckFn] = None,
    env: Optional[AmbientEnvironment] = None,
    style: FixStyle = FixStyle(),
    initial: Optional[CheckResult] = None,
) -> FixOutcome:
    """Repair cannot-find-name diagnostics with a require or a placeholder declaration.

    Names are handled in document order, each fixed at most once; a name on a
    line with other syntax errors is skipped, and retried after any later fix
    has gone in.  Every candidate edit is re-checked and kept only if the
    diagnostic count does not grow.
    """
    from .analyzer import check

    env = env or default_environment()
    check_fn = check_fn or (lambda s: check(s, env))
    if initial is not None:
        current = initial
    elif diagnostics is not None and tree is not None and scopes is not None:
        current = CheckResult(snippet, list(diagnostics), tree, scopes, env)
    else:
        current = check_fn(snippet)
    applied: list[FixAction] = []
    skipped: list[SkippedFix] = []
    attempted: set[str] = set()
    # names skipped for same-line syntax problems; an applied fix can change
    # the parse, so they are retried whenever a fix went in since the last try
    blocked: dict[str, SkippedFix] = {}
    dirty = False
    require_at = _shebang_end(snippet.text)
    compiles = 0

    while True:
        target = _next_target(current, attempted)
        if target is None:
            if not (blocked and dirty):
                break
            attempted.difference_update(blocked)
            blocked.clear()
            dirty = False
            continue
        diag, ref = target
        attempted.add(ref.name)
        if any(d.line == diag.line and d.code in BLOCKING_CODES for d in current.diagnostics):
            blocked[ref.name] = SkippedFix(diag, "line has other syntax problems")
            continue
        refs = [r for r in current.scopes.unresolved() if r.name == ref.name]
        if ref.name in env.modules and any(is_member_base(r) for r in refs):
            change = TextChange(Span(require_at, 0), style.require_line(ref.name))
            action = FixAction("targeted/require", f"Add require for '{ref.name}'", (change,), diag)
        elif is_direct_call(ref):
            skipped.append(SkippedFix(diag, "undefined function"))
            continue
        else:
            hint = expected_type_at(ref, current.tree, env, current.scopes)
            change = placeholder_change(ref, current.snippet, hint, style)
            action = FixAction("targeted/placeholder", f"Declare placeholder '{ref.name}'", (change,), diag)
        candidate = current.snippet.with_text(apply_changes(current.snippet.text, action.changes))
        result = check_fn(candidate)
        compiles += 1
        if result.count <= current.count:
            applied.append(action)
            current = result
            dirty = True
            if change.span.start <= require_at:
                require_at += byte_length(change.new_text)
        else:
            skipped.append(SkippedFix(diag, "increased diagnostic count", action))

    skipped.extend(blocked.values())
    return FixOutcome(applied, skipped, current.snippet.text, list(current.diagnostics), current, compiles)


def _next_target(result: CheckResult, attempted: set[str]) -> Optional[tuple[Diagnostic, Reference]]:
    for diag in result.diagnostics:
        if diag.code != codes.CANNOT_FIND_NAME:
            continue
        ref = result.scopes.reference_at(diag.span.start) if result.scopes else None
        if ref is None or ref.resolved or ref.name in attempted:
            continue
        return diag, ref
    return None


# -- codefix registry ----------------------------------------------------------------------


_REGISTRY: dict[int, list[CodefixFactory]] = {}


def register_codefix(code: int, factory: CodefixFactory) -> CodefixFactory:
    """Add ``factory`` to the fixes offered for diagnostics with ``code``."""
    _REGISTRY.setdefault(code, []).append(factory)
    return factory


def codefix(code: int):
    def decorator(factory: CodefixFactory) -> CodefixFactory:
        return register_codefix(code, factory)
    return decorator


def registered_codes() -> list[int]:
    return sorted(_REGISTRY)


def codefixes_for(diagnostic: Diagnostic, context: CheckResult) -> list[FixAction]:
    actions: list[FixAction] = []
    for factory in _REGISTRY.get(diagnostic.code, ()):
        actions.extend(factory(diagnostic, context))
    return actions


@codefix(codes.CANNOT_FIND_NAME_SUGGESTION)
def _rename_to_suggestion(diagnostic: Diagnostic, context: CheckResult) -> list[FixAction]:
    suggestion = suggestion_of(diagnostic)
    if not suggestion:
        return []
    change = TextChange(diagnostic.span, suggestion)
    return [FixAction("codefix/spelling", f"Change spelling to '{suggestion}'", (change,), diagnostic)]


def _ends_line(snippet: Snippet, offset: int) -> bool:
    """True when only whitespace follows ``offset`` on its line."""
    data = snippet.text.encode("utf-8")
    nl = data.find(b"\n", offset)
    return not data[offset: len(data) if nl < 0 else nl].strip()


@codefix(codes.EXPECTED)
def _insert_closer(diagnostic: Diagnostic, context: CheckResult) -> list[FixAction]:
    if context.tree is None:
        return []
    for closer in (")", "]", "}"):
        if diagnostic.message == codes.message(codes.EXPECTED, closer):
            insert_at = context.tree.closer_hints.get((diagnostic.span.start, closer))
            if insert_at is None:
                return []
            text = closer
            if closer == "}" and _ends_line(context.snippet, insert_at):
                # a brace of its own survives later deletion of the line before it
                text = "\n}"
            change = TextChange(Span(insert_at, 0), text)
            return [FixAction("codefix/insert-closer", f"Insert missing '{closer}'", (change,), diagnostic)]
    return []


# -- batch application -----------------------------------------------------------------------


def _action_key(action: FixAction) -> tuple:
    # total order on action content, so the outcome never depends on list order
    diag = action.target_diagnostic
    changes = tuple((c.span.start, c.span.length, c.new_text) for c in action.changes)
    return (diag.sort_key, diag.span.length, diag.message, action.fix_id, changes)


def select_changes(text: str, actions: Sequence[FixAction]) -> list[tuple[int, TextChange]]:
    """(action index, change) pairs that survive overlap filtering, in text order.

    Changes are ordered by (start, length), ties going to the action whose
    diagnostic sorts first and then to action content; a change is kept when
    it does not intersect any change kept before it.  Insertions only clash
    with replacements that strictly contain their offset, so several
    insertions at one offset are all kept.
    """
    size = byte_length(text)
    ranked = sorted(range(len(actions)), key=lambda i: _action_key(actions[i]))
    rank = {idx: pos for pos, idx in enumerate(ranked)}
    flat = []
    for idx, action in enumerate(actions):
        for change in action.changes:
            if not change.span.in_range(size):
                raise UsageError(f"change {change.span} outside text of {size} bytes")
            flat.append((change.span.start, change.span.length, rank[idx], idx, change))
    flat.sort(key=lambda item: item[:3])
    kept: list[tuple[int, TextChange]] = []
    last_end = -1
    for start, length, _, idx, change in flat:
        # sorted by start, so only the furthest-reaching kept end matters
        if start >= last_end:
            kept.append((idx, change))
            last_end = max(last_end, start + length)
    return kept


def apply_batch(text: str, actions: Sequence[FixAction]) -> tuple[str, list[FixAction]]:
    """Apply the non-overlapping subset of all changes in ``actions``.

    Returns the new text and, in input order, the actions with at least one
    kept change.
    """
    kept = select_changes(text, actions)
    kept_actions = {idx for idx, _ in kept}
    return apply_changes(text, [c for _, c in kept]), [a for i, a in enumerate(actions) if i in kept_actions]


MAX_CODEFIX_ROUNDS = 20


def _codefix_round(current: CheckResult, check_fn: CheckFn) -> Optional[FixOutcome]:
    actions: list[FixAction] = []
    for diag in current.diagnostics:
        actions.extend(codefixes_for(diag, current))
    if not actions:
        return None
    text, applied = apply_batch(current.snippet.text, actions)
    kept = {id(a) for a in applied}
    skipped = [SkippedFix(a.target_diagnostic, "overlaps an earlier change", a) for a in actions if id(a) not in kept]
    result = check_fn(current.snippet.with_text(text))
    if result.count > current.count:
        skipped = [SkippedFix(a.target_diagnostic, "batch increased diagnostic count", a) for a in actions]
        return FixOutcome([], skipped, current.snippet.text, list(current.diagnostics), current, 1)
    return FixOutcome(applied, skipped, text, list(result.diagnostics), result, 1)


def run_codefixes(current: CheckResult, check_fn: CheckFn, max_rounds: int = MAX_CODEFIX_ROUNDS) -> FixOutcome:
    """Apply batches of registered codefixes until none is left to apply.

    A batch that increases the diagnostic count is reverted and ends the
    loop.  Fixing one error can expose another (a closer inserted for an
    inner bracket reveals the outer one), hence the repetition.
    """
    total = FixOutcome([], [], current.snippet.text, list(current.diagnostics), current, 0)
    seen = {current.snippet.text}
    for _ in range(max_rounds):
        outcome = _codefix_round(current, check_fn)
        if outcome is None:
            break
        total.applied.extend(outcome.applied)
        total.skipped = outcome.skipped
        total.compile_count += outcome.compile_count
        total.text_after, total.diagnostics_after, total.result = (
            outcome.text_after, outcome.diagnostics_after, outcome.result)
        if not outcome.applied or outcome.text_after in seen:
            break
        seen.add(outcome.text_after)
        current = outcome.result
    return total

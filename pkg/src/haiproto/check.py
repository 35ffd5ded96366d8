"""Semantic checks for actions, messages, and patterns.

Three layers of checking, all reporting :class:`~haiproto.dsl.Diagnostic`
values instead of raising:

* :func:`check_action` — operations use declared variables with legal arity
  and type shapes.
* :func:`check_message` — a message instantiates a known action with the right
  argument count, distinct modifier keys, and distinct endpoints.
* :func:`check_pattern` — the messages of a pattern agree on the types of
  shared variables (binding consistency) and every request is eventually
  answered (dialogue coherence).

Dialogue coherence: a request by ``s`` to ``r`` opens an *obligation* for a
value of the request's head type.  A later message from ``r`` to ``s``
discharges the obligation when any type it carries is compatible with the
obligation's head — provides carry everything they mention, requests carry
only their references (asking about a value shows you hold it).  An open
obligation at the end of a pattern is a warning, with one exemption: a request
that itself discharged an obligation *and* creates one of its own references
is a productive counter-request (it answers by proposing new material whose
acceptance lies outside the pattern).  At scenario scope there is no
exemption: composed flows must close every request.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import (
    OP_ARITY,
    TAGS,
    ActionDef,
    Binding,
    GroupType,
    ListType,
    Message,
    OpKind,
    Pattern,
    PrimitiveKind,
    TypeExpr,
    action_scope,
    intersect,
    type_compatible,
)
from .dsl import Diagnostic


@dataclass(frozen=True)
class CheckReport:
    """All findings for one checked object."""

    target: str
    diagnostics: tuple[Diagnostic, ...]

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "warning")

    @property
    def verdict(self) -> str:
        if self.errors:
            return "fail"
        if self.warnings:
            return "warn"
        return "pass"


def _err(code: str, message: str, path: str) -> Diagnostic:
    return Diagnostic("error", code, message, path)


def _warn(code: str, message: str, path: str) -> Diagnostic:
    return Diagnostic("warning", code, message, path)


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------


def check_action(action: ActionDef, path: str = "<action>") -> CheckReport:
    """Validate an action's variables and operations."""
    diags: list[Diagnostic] = []
    pairs: list[tuple[str, TypeExpr]] = []
    for arg in action.primitive.args():
        pairs.extend(arg.variables())
    scope: dict[str, TypeExpr] = {}
    for var, typ in pairs:
        if var in scope:
            diags.append(
                _err("E-DUP-VAR", f"duplicate variable {var!r} in {action.name!r}", path)
            )
        else:
            scope[var] = typ
    if len(set(action.params)) != len(action.params):
        diags.append(
            _err("E-DUP-VAR", f"duplicate parameter in {action.name!r}", path)
        )
    elif set(action.params) != set(scope):
        diags.append(
            _err(
                "E-PARAMS",
                f"parameters of {action.name!r} do not match declared variables",
                path,
            )
        )

    for op in action.operations:
        lo, hi = OP_ARITY[op.kind]
        if not lo <= len(op.args) <= hi:
            diags.append(
                _err(
                    "E-ARITY",
                    f"{op.kind.value} in {action.name!r} takes "
                    f"{lo if lo == hi else f'{lo} to {hi}'} arguments, "
                    f"got {len(op.args)}",
                    path,
                )
            )
            continue
        unknown = [v for v in op.args if v not in scope]
        if unknown:
            diags.append(
                _err(
                    "E-OP-VAR",
                    f"{op.kind.value} in {action.name!r} uses undeclared "
                    f"variable{'s' if len(unknown) > 1 else ''} "
                    f"{', '.join(repr(v) for v in unknown)}",
                    path,
                )
            )
            continue
        if op.kind is OpKind.MODIFY:
            a, b = (scope[v] for v in op.args)
            if not type_compatible(a, b):
                diags.append(
                    _err(
                        "E-MODIFY-TYPE",
                        f"modify({', '.join(op.args)}) in {action.name!r} "
                        f"relates incompatible types {a} and {b}",
                        path,
                    )
                )
        elif op.kind is OpKind.SELECT and len(op.args) == 2:
            item, source = (scope[v] for v in op.args)
            if not isinstance(source, ListType):
                diags.append(
                    _err(
                        "E-SELECT-LIST",
                        f"select({', '.join(op.args)}) in {action.name!r} "
                        f"needs a list to select from, got {source}",
                        path,
                    )
                )
            elif not type_compatible(item, source.element):
                diags.append(
                    _err(
                        "E-SELECT-ELEM",
                        f"select({', '.join(op.args)}) in {action.name!r} "
                        f"selects {item} from a list of {source.element}",
                        path,
                    )
                )
    return CheckReport(f"action {action.name}", tuple(diags))


# ---------------------------------------------------------------------------
# Messages
# ---------------------------------------------------------------------------


def check_message(
    message: Message,
    actions: Mapping[str, ActionDef],
    path: str = "<message>",
) -> CheckReport:
    """Validate a message against the actions it may instantiate."""
    diags: list[Diagnostic] = []
    action = actions.get(message.action)
    if action is None:
        diags.append(
            _err(
                "E-UNKNOWN-ACTION",
                f"message {message.name!r} uses unknown action {message.action!r}",
                path,
            )
        )
        return CheckReport(f"message {message.name}", tuple(diags))
    if message.sender == message.receiver:
        diags.append(
            _err(
                "E-SELF-SEND",
                f"message {message.name!r} has sender and receiver "
                f"{message.sender!r}",
                path,
            )
        )
    if len(message.args) != len(action.params):
        diags.append(
            _err(
                "E-ARG-COUNT",
                f"message {message.name!r} passes {len(message.args)} arguments "
                f"to {action.name!r}, which takes {len(action.params)}",
                path,
            )
        )
    seen_keys: set[str] = set()
    for mod in message.modifiers:
        if mod.key in seen_keys:
            diags.append(
                _err(
                    "E-DUP-MOD",
                    f"message {message.name!r} repeats modifier key {mod.key!r}",
                    path,
                )
            )
        seen_keys.add(mod.key)
        if mod.style == "var" and mod.key not in message.args:
            diags.append(
                _err(
                    "E-UNKNOWN-MOD-VAR",
                    f"modifier {mod.key!r} on message {message.name!r} names "
                    f"no argument of the message",
                    path,
                )
            )
    return CheckReport(f"message {message.name}", tuple(diags))


# ---------------------------------------------------------------------------
# Patterns and coherence
# ---------------------------------------------------------------------------


def message_slots(
    message: Message, action: ActionDef
) -> tuple[tuple[str, TypeExpr], ...]:
    """Pair each message argument with its declared type, in parameter order.

    Requires the message to have the right argument count (checked by
    :func:`check_message`).
    """
    scope = dict(action_scope(action))
    return tuple(
        (msg_var, scope[param])
        for param, msg_var in zip(action.params, message.args)
    )


def _carried_types(action: ActionDef) -> tuple[TypeExpr, ...]:
    """Types a message of this action puts on the table.

    A provide carries its head and references; a request carries only its
    references.  Group arguments contribute both the group type and each
    member type.
    """
    prim = action.primitive
    args = prim.args() if prim.kind is PrimitiveKind.PROVIDE else prim.refs
    carried: list[TypeExpr] = []
    for arg in args:
        carried.append(arg.type)
        if isinstance(arg.type, GroupType):
            carried.extend(typ for _, typ in arg.type.members)
    return tuple(carried)


def _creates_reference(action: ActionDef) -> bool:
    """True when the action has a ``create`` over one of its references."""
    ref_vars = {
        var for arg in action.primitive.refs for var, _ in arg.variables()
    }
    return any(
        op.kind is OpKind.CREATE and any(v in ref_vars for v in op.args)
        for op in action.operations
    )


@dataclass
class _Obligation:
    requester: str
    requestee: str
    head: TypeExpr
    message: str
    exempt: bool


def check_pattern(
    pattern: Pattern,
    messages: Mapping[str, Message],
    actions: Mapping[str, ActionDef],
    scope: str = "pattern",
    path: str = "<pattern>",
) -> CheckReport:
    """Validate a pattern's structure, bindings, and dialogue coherence.

    ``scope`` is ``"pattern"`` (open requests may be excused as productive
    counter-requests and otherwise warn) or ``"scenario"`` (every open request
    is an error).
    """
    if scope not in ("pattern", "scenario"):
        raise ValueError(f"unknown scope {scope!r}")
    diags: list[Diagnostic] = []
    if not pattern.messages:
        diags.append(
            _err("E-EMPTY-PATTERN", f"pattern {pattern.name!r} has no messages", path)
        )
        return CheckReport(f"pattern {pattern.name}", tuple(diags))
    for tag in sorted(pattern.tags):
        if tag not in TAGS:
            diags.append(
                _err(
                    "E-TAG",
                    f"pattern {pattern.name!r} carries unknown tag {tag!r}",
                    path,
                )
            )

    resolved: list[tuple[Message, ActionDef]] = []
    for name in pattern.messages:
        message = messages.get(name)
        if message is None:
            diags.append(
                _err(
                    "E-UNRESOLVED",
                    f"pattern {pattern.name!r} references unknown message {name!r}",
                    path,
                )
            )
            continue
        action = actions.get(message.action)
        if action is None:
            diags.append(
                _err(
                    "E-UNKNOWN-ACTION",
                    f"message {name!r} uses unknown action {message.action!r}",
                    path,
                )
            )
            continue
        if len(message.args) != len(action.params):
            diags.append(
                _err(
                    "E-ARG-COUNT",
                    f"message {name!r} passes {len(message.args)} arguments to "
                    f"{action.name!r}, which takes {len(action.params)}",
                    path,
                )
            )
            continue
        resolved.append((message, action))
    if len(resolved) != len(pattern.messages):
        return CheckReport(f"pattern {pattern.name}", tuple(diags))

    # Binding consistency: a variable shared between messages must keep a
    # compatible type everywhere it appears; each use narrows it.
    binding = Binding()
    for message, action in resolved:
        for var, declared in message_slots(message, action):
            before = binding.types.get(var)
            if binding.narrow(var, declared) is None:
                diags.append(
                    _err(
                        "E-BINDING",
                        f"variable {var!r} is {before} but message "
                        f"{message.name!r} uses it as {declared}",
                        path,
                    )
                )

    # Dialogue coherence.
    open_obligations: list[_Obligation] = []
    for message, action in resolved:
        carried = _carried_types(action)
        discharged_any = False
        remaining: list[_Obligation] = []
        for ob in open_obligations:
            answers = (
                ob.requester == message.receiver
                and ob.requestee == message.sender
                and any(type_compatible(t, ob.head) for t in carried)
            )
            if answers:
                discharged_any = True
            else:
                remaining.append(ob)
        open_obligations = remaining
        if action.primitive.kind is PrimitiveKind.REQUEST:
            open_obligations.append(
                _Obligation(
                    requester=message.sender,
                    requestee=message.receiver,
                    head=action.primitive.head.type,
                    message=message.name,
                    exempt=discharged_any and _creates_reference(action),
                )
            )
    for ob in open_obligations:
        if scope == "pattern" and ob.exempt:
            continue
        detail = (
            f"request {ob.message!r} ({ob.requester} -> {ob.requestee}, "
            f"for {ob.head}) is never answered"
        )
        if scope == "scenario":
            diags.append(_err("E-UNANSWERED", detail, path))
        else:
            diags.append(_warn("W-UNANSWERED", detail, path))
    return CheckReport(f"pattern {pattern.name}", tuple(diags))

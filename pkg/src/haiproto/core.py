"""Core value types for the interaction calculus.

The calculus describes human-AI interactions as typed exchanges: *actions*
wrap a communication primitive (``provide`` or ``request``) over typed
variables, *messages* instantiate actions between agent roles, and *patterns*
sequence messages into reusable dialogue shapes.  Everything in this module is
an immutable value: constructing a type from the same inputs always yields an
equal value, and nothing here performs I/O.

Validation philosophy: constructors enforce only basic shape (so that
deliberately malformed definitions can be constructed and then *rejected* by
the checker); semantic rules live in :mod:`haiproto.check`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union


class Role(str, enum.Enum):
    """Communication role of a typed value."""

    INPUT = "input"
    OUTPUT = "output"
    FEEDBACK = "feedback"


#: Paradigm tags a pattern may carry (closed vocabulary).
TAGS: frozenset[str] = frozenset({"xai", "hitl", "hi", "control", "query"})

#: Agent roles that are always available without declaration.
PREDECLARED_ROLES: frozenset[str] = frozenset({"user", "model"})


@dataclass(frozen=True)
class BaseType:
    """A role with an optional union of subtype names.

    An empty ``subtypes`` tuple is the role-only wildcard: it is compatible
    with any subtype of the same role.
    """

    role: Role
    subtypes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.subtypes)) != len(self.subtypes):
            raise ValueError(f"duplicate subtypes in {self.subtypes!r}")

    def __str__(self) -> str:
        if not self.subtypes:
            return self.role.value
        return f"{self.role.value}.{'|'.join(self.subtypes)}"


@dataclass(frozen=True)
class ListType:
    """A homogeneous list of a base type."""

    element: BaseType

    def __str__(self) -> str:
        return f"[{self.element}]"


@dataclass(frozen=True)
class GroupType:
    """An ordered group of named members (no nesting).

    Members are ``(variable, type)`` pairs; member types may be base types or
    lists, never groups.  Member names are local to the owning action and are
    ignored by compatibility.
    """

    members: tuple[tuple[str, Union[BaseType, ListType]], ...]

    def __str__(self) -> str:
        inner = ", ".join(f"{var}: {typ}" for var, typ in self.members)
        return f"[{inner}]"


TypeExpr = Union[BaseType, ListType, GroupType]


def intersect(a: TypeExpr, b: TypeExpr) -> TypeExpr | None:
    """Return the greatest common refinement of two types, or ``None``.

    Base types intersect when their roles match and their subtype sets share a
    member; the role-only wildcard absorbs (intersecting with it yields the
    other operand).  Lists intersect element-wise, groups pointwise with equal
    arity.  Differing kinds never intersect.
    """
    if isinstance(a, BaseType) and isinstance(b, BaseType):
        if a.role is not b.role:
            return None
        if not a.subtypes:
            return b
        if not b.subtypes:
            return a
        common = tuple(s for s in a.subtypes if s in b.subtypes)
        if not common:
            return None
        return BaseType(a.role, common)
    if isinstance(a, ListType) and isinstance(b, ListType):
        element = intersect(a.element, b.element)
        if element is None:
            return None
        assert isinstance(element, BaseType)
        return ListType(element)
    if isinstance(a, GroupType) and isinstance(b, GroupType):
        if len(a.members) != len(b.members):
            return None
        members: list[tuple[str, Union[BaseType, ListType]]] = []
        for (var, ta), (_, tb) in zip(a.members, b.members):
            common = intersect(ta, tb)
            if common is None or isinstance(common, GroupType):
                return None
            members.append((var, common))
        return GroupType(tuple(members))
    return None


def type_compatible(a: TypeExpr, b: TypeExpr) -> bool:
    """True when the two types have a common refinement (symmetric)."""
    return intersect(a, b) is not None


class PrimitiveKind(str, enum.Enum):
    """The two communication primitives."""

    PROVIDE = "provide"
    REQUEST = "request"


@dataclass(frozen=True)
class Arg:
    """One argument of a primitive: a named type or an anonymous group.

    ``var`` is ``None`` exactly when ``type`` is a :class:`GroupType` (group
    members carry their own names).
    """

    var: str | None
    type: TypeExpr

    def variables(self) -> tuple[tuple[str, TypeExpr], ...]:
        """The ``(variable, type)`` pairs this argument declares, in order."""
        if isinstance(self.type, GroupType):
            return tuple(self.type.members)
        assert self.var is not None
        return ((self.var, self.type),)


@dataclass(frozen=True)
class PrimitiveSpec:
    """A primitive with its head argument and reference arguments.

    The head is the value the act is *about* (the thing provided, or the thing
    requested); refs carry the context the head relates to.
    """

    kind: PrimitiveKind
    head: Arg
    refs: tuple[Arg, ...] = ()

    def args(self) -> tuple[Arg, ...]:
        return (self.head,) + self.refs


class OpKind(str, enum.Enum):
    """Operation kinds relating variables inside an action."""

    SELECT = "select"
    MAP = "map"
    MODIFY = "modify"
    CREATE = "create"


#: Inclusive arity bounds per operation kind.
OP_ARITY: dict[OpKind, tuple[int, int]] = {
    OpKind.SELECT: (1, 2),
    OpKind.MAP: (2, 3),
    OpKind.MODIFY: (2, 2),
    OpKind.CREATE: (1, 1),
}


@dataclass(frozen=True)
class Operation:
    """An operation over declared variables, e.g. ``modify(Y, Z)``."""

    kind: OpKind
    args: tuple[str, ...]


@dataclass(frozen=True)
class ActionDef:
    """A named action: a primitive over typed variables plus operations.

    ``params`` is the author-facing parameter order used by messages; it must
    contain exactly the variables declared by the primitive (set equality),
    but may order them differently than the primitive declares them.
    """

    name: str
    params: tuple[str, ...]
    primitive: PrimitiveSpec
    operations: tuple[Operation, ...] = ()


def action_scope(action: ActionDef) -> tuple[tuple[str, TypeExpr], ...]:
    """The typed variables an action declares, in declaration order.

    The head's variables come first, then each ref's, with group members
    flattened in place.  Raises ``ValueError`` on duplicate variables or when
    ``params`` does not match the declared set.
    """
    pairs: list[tuple[str, TypeExpr]] = []
    for arg in action.primitive.args():
        pairs.extend(arg.variables())
    seen: set[str] = set()
    for var, _ in pairs:
        if var in seen:
            raise ValueError(f"duplicate variable {var!r} in action {action.name!r}")
        seen.add(var)
    if len(set(action.params)) != len(action.params):
        raise ValueError(f"duplicate parameter in action {action.name!r}")
    if set(action.params) != seen:
        raise ValueError(
            f"params {action.params!r} do not match declared variables in "
            f"action {action.name!r}"
        )
    return tuple(pairs)


@dataclass(frozen=True)
class Modifier:
    """A presentation annotation on a message.

    Two styles exist: variable annotations (``X: WalkStand`` — ``key`` is a
    message argument, ``value`` an identifier) and key-value strings
    (``ui="drag-drop"``).
    """

    key: str
    value: str
    style: str = "var"  # "var" | "kv"

    def __post_init__(self) -> None:
        if self.style not in ("var", "kv"):
            raise ValueError(f"unknown modifier style {self.style!r}")


@dataclass(frozen=True)
class Message:
    """A named, directed instantiation of an action between two roles.

    Modifiers are stored sorted by key, making message equality independent of
    the order they were written in.
    """

    name: str
    sender: str
    receiver: str
    action: str
    args: tuple[str, ...]
    modifiers: tuple[Modifier, ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.modifiers, key=lambda m: (m.key, m.value)))
        object.__setattr__(self, "modifiers", ordered)


@dataclass(frozen=True)
class Pattern:
    """A named sequence of message names with paradigm tags."""

    name: str
    messages: tuple[str, ...]
    tags: frozenset[str] = frozenset()
    notes: str = ""


@dataclass
class Binding:
    """A variable environment that narrows types as messages bind variables."""

    types: dict[str, TypeExpr] = field(default_factory=dict)

    def narrow(self, var: str, typ: TypeExpr) -> TypeExpr | None:
        """Intersect ``var``'s type with ``typ``; ``None`` if incompatible.

        On success the narrowed type is stored and returned.  On failure the
        previous type is kept unchanged.
        """
        current = self.types.get(var)
        if current is None:
            self.types[var] = typ
            return typ
        common = intersect(current, typ)
        if common is None:
            return None
        self.types[var] = common
        return common

    def snapshot(self) -> dict[str, TypeExpr]:
        return dict(self.types)

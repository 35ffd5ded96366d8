"""Loading and querying a catalog of actions, messages, and patterns.

A catalog is built from one or more ``.hai`` files plus an optional JSON
sidecar (``catalog.json``) holding what the grammar does not express:
*scenarios* (named pattern compositions), per-pattern *annotations*
(implementation concerns), the *provide_only* list (patterns of pure
provides), and *interpretations* (reading notes for figure-derived flows).

Loading resolves names in a single forward pass over files sorted by name:
later declarations may reference earlier ones, never the reverse.  Names are
corpus-global — declaring the same action, message, or pattern name twice is
an error (``E-DUP-NAME``), while re-declaring a role is harmless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .check import CheckReport, check_action, check_message, check_pattern
from .core import (
    PREDECLARED_ROLES,
    ActionDef,
    Message,
    Pattern,
    PrimitiveKind,
)
from .dsl import (
    ActionDecl,
    Diagnostic,
    MessageDecl,
    PatternDecl,
    RoleDecl,
    parse,
    print_type,
)


class CatalogError(Exception):
    """Raised by :func:`load` when the corpus has errors."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        lines = "\n".join(d.format() for d in self.diagnostics)
        super().__init__(f"catalog has {len(self.diagnostics)} error(s):\n{lines}")


@dataclass(frozen=True)
class Catalog:
    """A fully resolved corpus."""

    actions: dict[str, ActionDef]
    messages: dict[str, Message]
    patterns: dict[str, Pattern]
    scenarios: dict[str, tuple[str, ...]]
    annotations: dict[str, str]
    interpretations: dict[str, str]
    provide_only: frozenset[str]
    roles: frozenset[str]
    origins: dict[str, str] = field(default_factory=dict)
    sources: tuple[str, ...] = ()

    def resolve_flow(self, name: str) -> Pattern:
        """Return the pattern called ``name``, composing it if a scenario."""
        if name in self.patterns:
            return self.patterns[name]
        if name in self.scenarios:
            flow, _ = compose(self, self.scenarios[name])
            return Pattern(name, flow.messages, flow.tags)
        raise KeyError(f"no pattern or scenario named {name!r}")


def _collect_paths(paths: Sequence[str | Path]) -> tuple[list[Path], list[Path]]:
    """Expand the given paths into ``.hai`` files and JSON sidecars."""
    hai: list[Path] = []
    sidecars: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            hai.extend(sorted(p.glob("*.hai")))
            sidecar = p / "catalog.json"
            if sidecar.exists():
                sidecars.append(sidecar)
        elif p.suffix == ".json":
            sidecars.append(p)
        else:
            hai.append(p)
    return hai, sidecars


def load_with_diagnostics(
    paths: Sequence[str | Path],
) -> tuple[Catalog | None, tuple[Diagnostic, ...]]:
    """Build a catalog, returning ``None`` plus diagnostics on any error."""
    hai_files, sidecars = _collect_paths(paths)
    diags: list[Diagnostic] = []
    actions: dict[str, ActionDef] = {}
    messages: dict[str, Message] = {}
    patterns: dict[str, Pattern] = {}
    origins: dict[str, str] = {}
    roles: set[str] = set(PREDECLARED_ROLES)
    names: set[str] = set()

    def err(code: str, message: str, path: str) -> None:
        diags.append(Diagnostic("error", code, message, path))

    for file_path in hai_files:
        path = str(file_path)
        try:
            text = file_path.read_text(encoding="utf-8")
        except OSError as exc:
            err("E-LEX", f"cannot read file: {exc}", path)
            continue
        result = parse(text, path)
        diags.extend(result.diagnostics)
        if result.file is None:
            continue
        for decl in result.file.decls:
            if isinstance(decl, RoleDecl):
                roles.add(decl.name)
                continue
            if isinstance(decl, ActionDecl):
                name = decl.action.name
            elif isinstance(decl, MessageDecl):
                name = decl.message.name
            else:
                name = decl.pattern.name
            if name in names:
                err(
                    "E-DUP-NAME",
                    f"{name!r} is already declared in {origins[name]}",
                    path,
                )
                continue
            names.add(name)
            origins[name] = path
            if isinstance(decl, ActionDecl):
                actions[name] = decl.action
            elif isinstance(decl, MessageDecl):
                message = decl.message
                if message.action not in actions:
                    err(
                        "E-UNRESOLVED",
                        f"message {name!r} references unknown action "
                        f"{message.action!r}",
                        path,
                    )
                    continue
                for endpoint in (message.sender, message.receiver):
                    if endpoint not in roles:
                        err(
                            "E-UNKNOWN-ROLE",
                            f"message {name!r} uses undeclared role {endpoint!r}",
                            path,
                        )
                messages[name] = message
            else:
                pattern = decl.pattern
                unknown = [m for m in pattern.messages if m not in messages]
                for m in unknown:
                    err(
                        "E-UNRESOLVED",
                        f"pattern {name!r} references unknown message {m!r}",
                        path,
                    )
                if not unknown:
                    patterns[name] = pattern

    scenarios: dict[str, tuple[str, ...]] = {}
    annotations: dict[str, str] = {}
    interpretations: dict[str, str] = {}
    provide_only: set[str] = set()
    for sidecar in sidecars:
        path = str(sidecar)
        try:
            data = json.loads(sidecar.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            err("E-SYNTAX", f"cannot read sidecar: {exc}", path)
            continue
        if not isinstance(data, dict):
            err("E-SYNTAX", "sidecar must be a JSON object", path)
            continue
        for name, steps in data.get("scenarios", {}).items():
            # Scenarios share a namespace with patterns (both resolve as
            # runnable flows), not with messages or actions.
            if name in patterns or name in scenarios:
                err("E-DUP-NAME", f"scenario {name!r} clashes with an existing flow", path)
                continue
            missing = [s for s in steps if s not in patterns]
            for s in missing:
                err(
                    "E-UNRESOLVED",
                    f"scenario {name!r} references unknown pattern {s!r}",
                    path,
                )
            if not missing:
                scenarios[name] = tuple(steps)
                origins[name] = path
        for table, target in (
            ("annotations", annotations),
            ("interpretations", interpretations),
        ):
            for name, text in data.get(table, {}).items():
                if name not in patterns and name not in scenarios:
                    err(
                        "E-UNRESOLVED",
                        f"{table} entry {name!r} matches no pattern or scenario",
                        path,
                    )
                else:
                    target[name] = text
        for name in data.get("provide_only", []):
            if name not in patterns:
                err(
                    "E-UNRESOLVED",
                    f"provide_only entry {name!r} matches no pattern",
                    path,
                )
            else:
                provide_only.add(name)

    if any(d.severity == "error" for d in diags):
        return None, tuple(diags)
    catalog = Catalog(
        actions=actions,
        messages=messages,
        patterns=patterns,
        scenarios=scenarios,
        annotations=annotations,
        interpretations=interpretations,
        provide_only=frozenset(provide_only),
        roles=frozenset(roles),
        origins=origins,
        sources=tuple(str(p) for p in hai_files + sidecars),
    )
    return catalog, tuple(diags)


def load(paths: Sequence[str | Path]) -> Catalog:
    """Load a corpus, raising :class:`CatalogError` on any error."""
    catalog, diags = load_with_diagnostics(paths)
    if catalog is None:
        raise CatalogError([d for d in diags if d.severity == "error"])
    return catalog


def check_catalog(catalog: Catalog) -> list[CheckReport]:
    """Run every check over a loaded catalog, deterministically ordered."""
    reports: list[CheckReport] = []
    for name in sorted(catalog.actions):
        reports.append(
            check_action(catalog.actions[name], catalog.origins.get(name, "<catalog>"))
        )
    for name in sorted(catalog.messages):
        reports.append(
            check_message(
                catalog.messages[name],
                catalog.actions,
                catalog.origins.get(name, "<catalog>"),
            )
        )
    for name in sorted(catalog.patterns):
        reports.append(
            check_pattern(
                catalog.patterns[name],
                catalog.messages,
                catalog.actions,
                scope="pattern",
                path=catalog.origins.get(name, "<catalog>"),
            )
        )
    for name in sorted(catalog.scenarios):
        _, report = compose(catalog, catalog.scenarios[name])
        reports.append(
            CheckReport(f"scenario {name}", report.diagnostics)
        )
    return reports


# ---------------------------------------------------------------------------
# Query / diff / compose
# ---------------------------------------------------------------------------


def query(catalog: Catalog, tags: Iterable[str] = ()) -> list[Pattern]:
    """Patterns carrying *all* the given tags, sorted by name.

    With no tags, every pattern is returned.  Unknown tags raise
    ``ValueError`` rather than silently matching nothing.
    """
    wanted = frozenset(tags)
    from .core import TAGS

    unknown = sorted(wanted - TAGS)
    if unknown:
        raise ValueError(f"unknown tag(s): {', '.join(unknown)}")
    return [
        catalog.patterns[name]
        for name in sorted(catalog.patterns)
        if wanted <= catalog.patterns[name].tags
    ]


#: One diff unit: the direction and action of a message, e.g.
#: ``("user>model", "annotate-sample")``.
DiffItem = tuple[str, str]


@dataclass(frozen=True)
class PatternDiff:
    """Result of comparing two patterns step by step."""

    a: str
    b: str
    shared: tuple[DiffItem, ...]
    only_in_a: tuple[DiffItem, ...]
    only_in_b: tuple[DiffItem, ...]

    def transpose(self) -> "PatternDiff":
        return PatternDiff(self.b, self.a, self.shared, self.only_in_b, self.only_in_a)


def _diff_sequence(catalog: Catalog, pattern: Pattern) -> list[DiffItem]:
    items: list[DiffItem] = []
    for name in pattern.messages:
        message = catalog.messages[name]
        items.append((f"{message.sender}>{message.receiver}", message.action))
    return items


def _lcs_diff(a: list[DiffItem], b: list[DiffItem]) -> tuple[
    tuple[DiffItem, ...], tuple[DiffItem, ...], tuple[DiffItem, ...]
]:
    """Classic longest-common-subsequence split with a fixed tie-break."""
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                dp[i][j] = dp[i + 1][j + 1] + 1
            else:
                dp[i][j] = max(dp[i + 1][j], dp[i][j + 1])
    shared: list[DiffItem] = []
    only_a: list[DiffItem] = []
    only_b: list[DiffItem] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            shared.append(a[i])
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            only_a.append(a[i])
            i += 1
        else:
            only_b.append(b[j])
            j += 1
    only_a.extend(a[i:])
    only_b.extend(b[j:])
    return tuple(shared), tuple(only_a), tuple(only_b)


def diff(catalog: Catalog, name_a: str, name_b: str) -> PatternDiff:
    """Compare two patterns as sequences of ``(direction, action)`` steps.

    Anti-symmetric by construction: ``diff(c, b, a)`` is exactly
    ``diff(c, a, b).transpose()``.
    """
    for name in (name_a, name_b):
        if name not in catalog.patterns:
            raise KeyError(f"no pattern named {name!r}")
    if name_b < name_a:
        return diff(catalog, name_b, name_a).transpose()
    seq_a = _diff_sequence(catalog, catalog.patterns[name_a])
    seq_b = _diff_sequence(catalog, catalog.patterns[name_b])
    shared, only_a, only_b = _lcs_diff(seq_a, seq_b)
    return PatternDiff(name_a, name_b, shared, only_a, only_b)


def compose(
    catalog: Catalog, names: Sequence[str]
) -> tuple[Pattern, CheckReport]:
    """Concatenate patterns into one flow and check it at scenario scope.

    Returns the composed (anonymous) pattern together with the scenario-scope
    check report; composing an empty list raises ``ValueError``.
    """
    if not names:
        raise ValueError("cannot compose an empty list of patterns")
    parts: list[Pattern] = []
    for name in names:
        pattern = catalog.patterns.get(name)
        if pattern is None:
            raise ValueError(f"no pattern named {name!r}")
        parts.append(pattern)
    combined = Pattern(
        name="+".join(names),
        messages=tuple(m for p in parts for m in p.messages),
        tags=frozenset().union(*(p.tags for p in parts)),
    )
    report = check_pattern(
        combined,
        catalog.messages,
        catalog.actions,
        scope="scenario",
        path="<scenario>",
    )
    return combined, report


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def _arg_json(arg) -> dict:
    if arg.var is None:
        return {
            "group": [
                {"var": var, "type": print_type(typ)} for var, typ in arg.type.members
            ]
        }
    return {"var": arg.var, "type": print_type(arg.type)}


def export_json(catalog: Catalog) -> dict:
    """A deterministic JSON-ready view of the whole catalog."""
    actions = [
        {
            "name": a.name,
            "params": list(a.params),
            "primitive": a.primitive.kind.value,
            "head": _arg_json(a.primitive.head),
            "refs": [_arg_json(r) for r in a.primitive.refs],
            "operations": [
                {"op": op.kind.value, "args": list(op.args)} for op in a.operations
            ],
        }
        for a in (catalog.actions[n] for n in sorted(catalog.actions))
    ]
    patterns = []
    for name in sorted(catalog.patterns):
        p = catalog.patterns[name]
        entry: dict = {
            "name": p.name,
            "tags": sorted(p.tags),
            "provide_only": name in catalog.provide_only,
            "messages": [
                {
                    "name": m.name,
                    "sender": m.sender,
                    "receiver": m.receiver,
                    "action": m.action,
                    "args": list(m.args),
                    "modifiers": {mod.key: mod.value for mod in m.modifiers},
                }
                for m in (catalog.messages[mn] for mn in p.messages)
            ],
        }
        if name in catalog.annotations:
            entry["annotation"] = catalog.annotations[name]
        if name in catalog.interpretations:
            entry["interpretation"] = catalog.interpretations[name]
        patterns.append(entry)
    scenarios = [
        {
            "name": name,
            "patterns": list(catalog.scenarios[name]),
            "messages": len(catalog.resolve_flow(name).messages),
        }
        for name in sorted(catalog.scenarios)
    ]
    return {"actions": actions, "patterns": patterns, "scenarios": scenarios}

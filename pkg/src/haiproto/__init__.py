"""haiproto — an executable toolkit for a human-AI interaction calculus.

The package models interactions as typed message exchanges: :mod:`.core`
defines the value types, :mod:`.dsl` parses and prints the ``.hai`` protocol
language, :mod:`.check` validates types and dialogue coherence,
:mod:`.catalog` loads and queries the bundled pattern corpus, :mod:`.runtime`
simulates patterns with pluggable agents, and :mod:`.cli` exposes it all as
the ``haiproto`` command.
"""

from __future__ import annotations

from .catalog import (
    Catalog,
    CatalogError,
    PatternDiff,
    check_catalog,
    compose,
    diff,
    export_json,
    load,
    load_with_diagnostics,
    query,
)
from .check import CheckReport, check_action, check_message, check_pattern
from .core import (
    TAGS,
    ActionDef,
    Arg,
    BaseType,
    Binding,
    GroupType,
    ListType,
    Message,
    Modifier,
    OpKind,
    Operation,
    Pattern,
    PrimitiveKind,
    PrimitiveSpec,
    Role,
    action_scope,
    intersect,
    type_compatible,
)
from .dsl import (
    Diagnostic,
    ParseResult,
    SourceFile,
    Span,
    parse,
    parse_type,
    print_action,
    print_message,
    print_pattern,
    print_source,
    print_type,
)
from .runtime import (
    AgentBehavior,
    Blob,
    Payload,
    ScriptedAgent,
    StubModelAgent,
    Trace,
    TraceStep,
    Vector,
    classify,
    parse_agents,
    replay_check,
    run,
    run_scenario,
)

__version__ = "0.1.0"


def fixtures_dir():
    """Path to the packaged fixture corpus."""
    from .cli import default_fixtures_dir

    return default_fixtures_dir()


__all__ = [
    "TAGS",
    "ActionDef",
    "AgentBehavior",
    "Arg",
    "BaseType",
    "Binding",
    "Blob",
    "Catalog",
    "CatalogError",
    "CheckReport",
    "Diagnostic",
    "GroupType",
    "ListType",
    "Message",
    "Modifier",
    "OpKind",
    "Operation",
    "ParseResult",
    "Pattern",
    "PatternDiff",
    "Payload",
    "PrimitiveKind",
    "PrimitiveSpec",
    "Role",
    "ScriptedAgent",
    "SourceFile",
    "Span",
    "StubModelAgent",
    "Trace",
    "TraceStep",
    "Vector",
    "action_scope",
    "check_action",
    "check_catalog",
    "check_message",
    "check_pattern",
    "classify",
    "compose",
    "diff",
    "export_json",
    "fixtures_dir",
    "intersect",
    "load",
    "load_with_diagnostics",
    "parse",
    "parse_agents",
    "parse_type",
    "print_action",
    "print_message",
    "print_pattern",
    "print_source",
    "print_type",
    "query",
    "replay_check",
    "run",
    "run_scenario",
    "type_compatible",
]

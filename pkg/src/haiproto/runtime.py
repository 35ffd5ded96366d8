"""Deterministic simulation of patterns and scenarios.

The runtime steps through a pattern's messages: at each step the *sender*
produces payloads for the variables it may introduce, the runtime validates
them, binds them, and delivers the message to the *receiver*.  Producibility
follows the primitive: a provide's sender may produce every variable of the
message, a request's sender only its references (the head is what the other
party is being asked for).

Violations abort the run with a coded verdict, in this order of precedence:

* ``V-AGENT`` — the agent raised, or produced a variable outside the message.
* ``V-REBIND`` — a produced value differs from the variable's bound value.
* ``V-MISSING`` — a producible unbound variable was not produced.
* ``V-TYPE`` — a payload's type is incompatible with the variable's type.

Runs are reproducible: agents are deterministic given their configuration,
and traces serialize to canonical JSON lines, so the same pattern, agents,
and seed always yield byte-identical traces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .catalog import Catalog, compose
from .check import check_pattern, message_slots
from .core import (
    ActionDef,
    BaseType,
    Binding,
    GroupType,
    ListType,
    Message,
    OpKind,
    Pattern,
    PrimitiveKind,
    Role,
    TypeExpr,
    intersect,
)
from .dsl import Diagnostic, parse_type, print_type
import json


@dataclass(frozen=True)
class Vector:
    """A numeric feature vector."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class Blob:
    """An opaque artifact stood in for by a stable name (e.g. a rendering)."""

    ref: str


Scalar = Union[str, int, float, Vector, Blob]
Value = Union[Scalar, tuple]


def _is_scalar(value: object) -> bool:
    return isinstance(value, (str, int, float, Vector, Blob)) and not isinstance(
        value, bool
    )


@dataclass(frozen=True)
class Payload:
    """A typed runtime value: list types hold tuples, base types scalars."""

    type: TypeExpr
    value: Value

    def __post_init__(self) -> None:
        if isinstance(self.type, GroupType):
            raise ValueError("payloads carry base or list types, not groups")
        if isinstance(self.type, ListType):
            if not isinstance(self.value, tuple) or not all(
                _is_scalar(v) for v in self.value
            ):
                raise ValueError(
                    f"list-typed payload needs a tuple of scalars, got "
                    f"{self.value!r}"
                )
        elif not _is_scalar(self.value):
            raise ValueError(f"payload value {self.value!r} is not a scalar")

    def to_json(self) -> dict:
        return {"type": print_type(self.type), "value": _value_json(self.value)}


def _value_json(value: Value) -> object:
    if isinstance(value, Vector):
        return {"vec": list(value.values)}
    if isinstance(value, Blob):
        return {"blob": value.ref}
    if isinstance(value, tuple):
        return [_value_json(v) for v in value]
    return value


def _value_from_json(data: object) -> Value:
    if isinstance(data, dict):
        if "vec" in data:
            return Vector(tuple(data["vec"]))
        if "blob" in data:
            return Blob(data["blob"])
        raise ValueError(f"unknown value encoding {data!r}")
    if isinstance(data, list):
        return tuple(_value_from_json(v) for v in data)
    return data  # type: ignore[return-value]


def coerce_value(raw: object) -> Value:
    """Normalize a literal into a payload value (lists become tuples)."""
    if isinstance(raw, (list, tuple)):
        return tuple(coerce_value(v) for v in raw)  # type: ignore[misc]
    if isinstance(raw, (str, int, float, Vector, Blob)):
        return raw
    raise ValueError(f"unsupported payload literal {raw!r}")


# ---------------------------------------------------------------------------
# Classification used by the stub model
# ---------------------------------------------------------------------------


def classify(
    examples: Sequence[tuple[Sequence[float], str]],
    point: Union[Vector, Sequence[float]],
) -> str:
    """Nearest-centroid label for ``point`` given labeled example vectors.

    Examples with the same label are averaged into one centroid; the label of
    the centroid with the smallest squared Euclidean distance wins, with exact
    ties broken toward the lexicographically smaller label.
    """
    if not examples:
        raise ValueError("cannot classify without examples")
    coords = tuple(point.values) if isinstance(point, Vector) else tuple(
        float(v) for v in point
    )
    sums: dict[str, list[float]] = {}
    counts: dict[str, int] = {}
    for vec, label in examples:
        vec = tuple(float(v) for v in vec)
        if len(vec) != len(coords):
            raise ValueError(
                f"dimension mismatch: example has {len(vec)} coordinates, "
                f"point has {len(coords)}"
            )
        if label not in sums:
            sums[label] = [0.0] * len(coords)
            counts[label] = 0
        for i, v in enumerate(vec):
            sums[label][i] += v
        counts[label] += 1
    best: tuple[float, str] | None = None
    for label in sums:
        centroid = [s / counts[label] for s in sums[label]]
        dist = sum((c - p) ** 2 for c, p in zip(centroid, coords))
        if best is None or (dist, label) < best:
            best = (dist, label)
    assert best is not None
    return best[1]


# ---------------------------------------------------------------------------
# Agents
# ---------------------------------------------------------------------------


class AgentBehavior:
    """Base class for pluggable agents.

    ``produce`` returns payloads for the variables in ``needed`` (a mapping
    of variable name to its current narrowed type); ``on_receive`` lets the
    receiver observe a delivered message.  Both see ``binding``, the values
    bound so far, and must be deterministic.
    """

    def produce(
        self,
        message: Message,
        action: ActionDef,
        needed: Mapping[str, TypeExpr],
        binding: Mapping[str, Payload],
    ) -> Mapping[str, Payload]:
        raise NotImplementedError

    def on_receive(
        self,
        message: Message,
        action: ActionDef,
        binding: Mapping[str, Payload],
    ) -> None:
        return None


class ScriptedAgent(AgentBehavior):
    """Replays configured values, keyed by ``"<message>.<variable>"``.

    Each key holds a queue consumed across produce calls (and across
    scenario repetitions); when exhausted, the last value repeats.  A needed
    variable with no queue is simply not produced, which the runtime reports
    as ``V-MISSING``.
    """

    def __init__(self, script: Mapping[str, Sequence[object]]):
        self.script = {key: list(values) for key, values in script.items()}
        for key, values in self.script.items():
            if not values:
                raise ValueError(f"empty script queue for {key!r}")
        self._cursor: dict[str, int] = {}

    def produce(self, message, action, needed, binding):
        out: dict[str, Payload] = {}
        for var, typ in needed.items():
            key = f"{message.name}.{var}"
            queue = self.script.get(key)
            if queue is None:
                continue
            index = self._cursor.get(key, 0)
            raw = queue[min(index, len(queue) - 1)]
            self._cursor[key] = index + 1
            out[var] = Payload(typ, coerce_value(raw))
        return out


class StubModelAgent(AgentBehavior):
    """A minimal learner: remembers labeled vectors, answers by similarity.

    Receiving a provide whose head is an output label bound to a symbol, with
    a map operation linking it to a vector-valued variable, stores the
    ``(vector, label)`` pair as a training example.  When asked to produce:

    * a list of output labels — the sorted vocabulary seen so far,
    * an output value tied by ``map`` to a bound vector — the nearest-centroid
      label over stored examples,
    * feedback — a stable placeholder blob named after the subtype,
    * any other input or output — the next queued sample vector,

    with per-variable scripted overrides taking precedence.  Anything else
    raises, which the runtime reports as ``V-AGENT``.
    """

    def __init__(
        self,
        labels: Sequence[str] = (),
        examples: Sequence[tuple[Sequence[float], str]] = (),
        samples: Sequence[object] = (),
        script: Mapping[str, Sequence[object]] | None = None,
    ):
        self.labels = tuple(labels)
        self.examples: list[tuple[tuple[float, ...], str]] = [
            (tuple(float(v) for v in vec), label) for vec, label in examples
        ]
        self.samples = list(samples)
        self._sample_cursor = 0
        self._override = ScriptedAgent(script) if script else None

    # -- learning ------------------------------------------------------------

    def on_receive(self, message, action, binding):
        head = action.primitive.head
        if head.var is None:
            return
        head_type = head.type
        if not isinstance(head_type, BaseType) or head_type.role is not Role.OUTPUT:
            return
        if head_type.subtypes and "label" not in head_type.subtypes:
            return
        to_message = dict(zip(action.params, message.args))
        label_payload = binding.get(to_message[head.var])
        if label_payload is None or not isinstance(label_payload.value, str):
            return
        for op in action.operations:
            if op.kind is not OpKind.MAP or head.var not in op.args:
                continue
            for other in op.args:
                if other == head.var:
                    continue
                payload = binding.get(to_message.get(other, ""))
                if payload is not None and isinstance(payload.value, Vector):
                    self.examples.append((payload.value.values, label_payload.value))
                    return

    # -- producing -----------------------------------------------------------

    def _vocabulary(self) -> tuple[str, ...]:
        seen = set(self.labels) | {label for _, label in self.examples}
        return tuple(sorted(seen))

    def _next_sample(self) -> Value:
        if not self.samples:
            raise RuntimeError("stub has no sample values configured")
        raw = self.samples[min(self._sample_cursor, len(self.samples) - 1)]
        self._sample_cursor += 1
        return coerce_value(raw)

    def produce(self, message, action, needed, binding):
        out: dict[str, Payload] = {}
        if self._override is not None:
            out.update(self._override.produce(message, action, needed, binding))
        to_message = dict(zip(action.params, message.args))
        to_param = {msg: param for param, msg in to_message.items()}
        for var, typ in needed.items():
            if var in out:
                continue
            out[var] = Payload(typ, self._produce_value(
                action, typ, to_message, to_param[var], binding, out
            ))
        return out

    def _produce_value(self, action, typ, to_message, param, binding, pending):
        if isinstance(typ, ListType) and typ.element.role is Role.OUTPUT:
            return self._vocabulary()
        if isinstance(typ, BaseType):
            if typ.role is Role.OUTPUT and "raw_data" not in typ.subtypes:
                source = self._map_source(action, to_message, param, binding, pending)
                if source is not None and self.examples:
                    return classify(self.examples, source)
            if typ.role is Role.FEEDBACK:
                return Blob(typ.subtypes[0] if typ.subtypes else "feedback")
            if typ.role in (Role.INPUT, Role.OUTPUT):
                return self._next_sample()
        raise RuntimeError(f"stub cannot produce a value of type {typ}")

    def _map_source(self, action, to_message, param, binding, pending):
        """A vector bound to a variable that shares a map with ``param``."""
        for op in action.operations:
            if op.kind is not OpKind.MAP or param not in op.args:
                continue
            for other in op.args:
                if other == param:
                    continue
                var = to_message.get(other)
                payload = pending.get(var) or binding.get(var)
                if payload is not None and isinstance(payload.value, Vector):
                    return payload.value
        return None


# ---------------------------------------------------------------------------
# Agent configuration files
# ---------------------------------------------------------------------------

_SECTION_RE = re.compile(r"^\[([A-Za-z_][A-Za-z0-9_]*)\s+(scripted|stub)\]$")
_NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?$")


def _parse_literal(text: str, where: str) -> object:
    text = text.strip()
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    if _NUMBER_RE.match(text):
        return float(text) if "." in text else int(text)
    if text.startswith("vec(") and text.endswith(")"):
        inner = text[4:-1].strip()
        parts = [p.strip() for p in inner.split(",")] if inner else []
        try:
            return Vector(tuple(float(p) for p in parts))
        except ValueError:
            raise ValueError(f"{where}: malformed vector {text!r}") from None
    if text.startswith("blob(") and text.endswith(")"):
        return Blob(text[5:-1].strip())
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return tuple(_parse_literal(p, where) for p in _split_top(inner))
    if re.match(r"^[A-Za-z][A-Za-z0-9_-]*$", text):
        return text
    raise ValueError(f"{where}: cannot parse literal {text!r}")


def _split_top(text: str) -> list[str]:
    """Split on commas not nested inside parentheses or brackets."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def parse_agents(text: str, path: str = "<agents>") -> dict[str, AgentBehavior]:
    """Parse an ``.agents`` configuration into agents keyed by role.

    The format is line-based::

        [user scripted]
        A2.Y = "happy"        // repeat a key to queue several values
        A4.X = vec(0.0, 0.0)

        [model stub]
        labels = calm, happy, sad
        example = vec(0.0, 0.0) -> happy
        sample = vec(1.0, 1.0)

    Raises ``ValueError`` on malformed input.
    """
    agents: dict[str, AgentBehavior] = {}
    section: tuple[str, str] | None = None
    script: dict[str, list[object]] = {}
    stub: dict[str, list] = {}

    def flush() -> None:
        nonlocal script, stub
        if section is None:
            return
        role, kind = section
        if role in agents:
            raise ValueError(f"{path}: duplicate section for role {role!r}")
        if kind == "scripted":
            agents[role] = ScriptedAgent(script)
        else:
            agents[role] = StubModelAgent(
                labels=stub.get("labels", []),
                examples=stub.get("examples", []),
                samples=stub.get("samples", []),
                script=script or None,
            )
        script, stub = {}, {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("//", 1)[0].strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        match = _SECTION_RE.match(line)
        if match:
            flush()
            section = (match.group(1), match.group(2))
            continue
        if section is None:
            raise ValueError(f"{where}: expected a [role kind] section header")
        if "=" not in line:
            raise ValueError(f"{where}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        kind = section[1]
        if kind == "stub" and key == "labels":
            stub.setdefault("labels", []).extend(
                str(_parse_literal(p, where)) for p in _split_top(value)
            )
        elif kind == "stub" and key == "example":
            if "->" not in value:
                raise ValueError(f"{where}: example needs 'vec(...) -> label'")
            vec_text, label_text = value.rsplit("->", 1)
            vec = _parse_literal(vec_text, where)
            if not isinstance(vec, Vector):
                raise ValueError(f"{where}: example input must be a vector")
            stub.setdefault("examples", []).append(
                (vec.values, str(_parse_literal(label_text, where)))
            )
        elif kind == "stub" and key == "sample":
            stub.setdefault("samples", []).append(_parse_literal(value, where))
        elif re.match(r"^[A-Za-z][A-Za-z0-9_-]*\.[A-Za-z][A-Za-z0-9_]*$", key):
            script.setdefault(key, []).append(_parse_literal(value, where))
        else:
            raise ValueError(f"{where}: unknown key {key!r}")
    flush()
    if not agents:
        raise ValueError(f"{path}: no agent sections found")
    return agents


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    """One executed message: what was produced and the bindings after it."""

    step: int
    message: str
    sender: str
    receiver: str
    action: str
    produced: dict[str, dict]
    bindings: dict[str, dict]
    verdict: str
    detail: str | None = None

    def to_json(self) -> dict:
        data = {
            "step": self.step,
            "message": self.message,
            "sender": self.sender,
            "receiver": self.receiver,
            "action": self.action,
            "produced": self.produced,
            "bindings": self.bindings,
            "verdict": self.verdict,
        }
        if self.detail is not None:
            data["detail"] = self.detail
        return data


@dataclass(frozen=True)
class Trace:
    """A full run: header, steps, and outcome, serializable to JSON lines."""

    run_id: str
    pattern: str
    seed: int
    steps: tuple[TraceStep, ...]
    outcome: Union[str, dict]

    def to_jsonl(self) -> str:
        def dump(obj: object) -> str:
            return json.dumps(obj, sort_keys=True, separators=(",", ":"))

        lines = [dump({"run": self.run_id, "pattern": self.pattern, "seed": self.seed})]
        lines.extend(dump(step.to_json()) for step in self.steps)
        lines.append(
            dump({"run": self.run_id, "steps": len(self.steps), "outcome": self.outcome})
        )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        traces = cls.all_from_jsonl(text)
        if len(traces) != 1:
            raise ValueError(f"expected one trace, found {len(traces)}")
        return traces[0]

    @classmethod
    def all_from_jsonl(cls, text: str) -> list["Trace"]:
        """Parse a stream of traces, e.g. a ``--repeat K --trace FILE`` file."""
        entries = [json.loads(line) for line in text.splitlines() if line.strip()]
        traces: list[Trace] = []
        start = 0
        for index, entry in enumerate(entries):
            if "outcome" in entry:
                traces.append(cls._from_entries(entries[start : index + 1]))
                start = index + 1
        if start != len(entries):
            raise ValueError("trace ends without an outcome line")
        return traces

    @classmethod
    def _from_entries(cls, lines: list[dict]) -> "Trace":
        if len(lines) < 2:
            raise ValueError("a trace needs a header and an outcome line")
        header, *body, footer = lines
        steps = tuple(
            TraceStep(
                step=entry["step"],
                message=entry["message"],
                sender=entry["sender"],
                receiver=entry["receiver"],
                action=entry["action"],
                produced=entry["produced"],
                bindings=entry["bindings"],
                verdict=entry["verdict"],
                detail=entry.get("detail"),
            )
            for entry in body
        )
        return cls(
            run_id=header["run"],
            pattern=header["pattern"],
            seed=header["seed"],
            steps=steps,
            outcome=footer["outcome"],
        )


class RunViolation(Exception):
    """Internal: aborts a run with a coded verdict."""

    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def _producible_vars(message: Message, action: ActionDef) -> tuple[str, ...]:
    """Message variables the sender may introduce at this step."""
    to_message = dict(zip(action.params, message.args))
    if action.primitive.kind is PrimitiveKind.PROVIDE:
        args = action.primitive.args()
    else:
        args = action.primitive.refs
    out: list[str] = []
    for arg in args:
        for var, _ in arg.variables():
            mapped = to_message[var]
            if mapped not in out:
                out.append(mapped)
    return tuple(out)


def run(
    catalog: Catalog,
    flow: Union[str, Pattern],
    agents: Mapping[str, AgentBehavior],
    seed: int = 0,
    run_id: str | None = None,
) -> Trace:
    """Simulate one pass over a pattern (or a named pattern/scenario).

    The flow must check without errors; every participating role must have an
    agent (``LookupError`` otherwise).  A violation aborts the run and is
    recorded in the trace outcome rather than raised.
    """
    pattern = catalog.resolve_flow(flow) if isinstance(flow, str) else flow
    report = check_pattern(pattern, catalog.messages, catalog.actions)
    if report.errors:
        raise ValueError(
            f"cannot run {pattern.name!r}: "
            + "; ".join(d.message for d in report.errors)
        )
    resolved = [
        (catalog.messages[name], catalog.actions[catalog.messages[name].action])
        for name in pattern.messages
    ]
    for message, _ in resolved:
        for role in (message.sender, message.receiver):
            if role not in agents:
                raise LookupError(f"no agent for role {role!r}")
    if run_id is None:
        run_id = f"{pattern.name}-s{seed}-r0"

    values: dict[str, Payload] = {}
    types = Binding()
    steps: list[TraceStep] = []
    outcome: Union[str, dict] = "completed"

    for index, (message, action) in enumerate(resolved, start=1):
        slots = message_slots(message, action)
        for var, declared in slots:
            types.narrow(var, declared)
        producible = _producible_vars(message, action)
        needed: dict[str, TypeExpr] = {}
        for _, msg_var in zip(action.params, message.args):
            if msg_var in producible and msg_var not in values:
                needed.setdefault(msg_var, types.types[msg_var])
        produced_json: dict[str, dict] = {}
        verdict, detail = "ok", None
        try:
            try:
                produced = dict(
                    agents[message.sender].produce(
                        message, action, dict(needed), dict(values)
                    )
                )
            except RunViolation:
                raise
            except Exception as exc:
                raise RunViolation("V-AGENT", f"producer failed: {exc}") from exc
            for var in sorted(produced):
                if var not in message.args:
                    raise RunViolation(
                        "V-AGENT",
                        f"agent produced {var!r}, not a variable of "
                        f"{message.name!r}",
                    )
                if var not in producible and var not in values:
                    raise RunViolation(
                        "V-AGENT",
                        f"sender of {message.name!r} may not produce {var!r}",
                    )
            for var in sorted(produced):
                if var in values and produced[var] != values[var]:
                    raise RunViolation(
                        "V-REBIND",
                        f"{var!r} is already bound to a different value",
                    )
            for var in needed:
                if var not in produced:
                    raise RunViolation(
                        "V-MISSING",
                        f"sender of {message.name!r} did not produce {var!r}",
                    )
            for var in needed:
                payload = produced[var]
                if intersect(payload.type, types.types[var]) is None:
                    raise RunViolation(
                        "V-TYPE",
                        f"{var!r} expects {types.types[var]}, got "
                        f"{payload.type}",
                    )
            for var in needed:
                values[var] = produced[var]
                types.narrow(var, produced[var].type)
                produced_json[var] = produced[var].to_json()
            try:
                agents[message.receiver].on_receive(message, action, dict(values))
            except Exception as exc:
                raise RunViolation("V-AGENT", f"receiver failed: {exc}") from exc
        except RunViolation as violation:
            verdict, detail = violation.code, violation.detail
            outcome = {"aborted": {"step": index, "code": violation.code}}
        steps.append(
            TraceStep(
                step=index,
                message=message.name,
                sender=message.sender,
                receiver=message.receiver,
                action=action.name,
                produced=produced_json,
                bindings={v: values[v].to_json() for v in sorted(values)},
                verdict=verdict,
                detail=detail,
            )
        )
        if verdict != "ok":
            break
    return Trace(run_id, pattern.name, seed, tuple(steps), outcome)


def run_scenario(
    catalog: Catalog,
    name: str,
    agents: Mapping[str, AgentBehavior],
    seed: int = 0,
    repeat: int = 1,
) -> list[Trace]:
    """Run a named scenario (or pattern) ``repeat`` times.

    Each repetition starts from empty bindings but keeps the same agent
    objects, so stateful agents accumulate across repetitions.  ``repeat=0``
    returns an empty list.
    """
    if name in catalog.scenarios:
        flow, report = compose(catalog, catalog.scenarios[name])
        if report.errors:
            raise ValueError(
                f"scenario {name!r} fails checking: "
                + "; ".join(d.message for d in report.errors)
            )
        flow = Pattern(name, flow.messages, flow.tags)
    else:
        flow = catalog.resolve_flow(name)
    traces: list[Trace] = []
    for rep in range(repeat):
        traces.append(
            run(catalog, flow, agents, seed=seed, run_id=f"{name}-s{seed}-r{rep}")
        )
    return traces


def replay_check(
    trace: Union[Trace, str, Iterable[str]], catalog: Catalog
) -> list[Diagnostic]:
    """Re-walk a trace's bindings through the type checker.

    Narrows each variable by its declared slot types and by the payload types
    recorded in the trace; any incompatibility yields an ``E-BINDING``
    diagnostic.  A clean list means the trace is type-faithful to the catalog.
    Text input may hold several concatenated traces (a ``--repeat`` trace
    file); each is checked independently.
    """
    if isinstance(trace, Trace):
        traces = [trace]
    elif isinstance(trace, str):
        traces = Trace.all_from_jsonl(trace)
    else:
        traces = Trace.all_from_jsonl("\n".join(trace))
    diags: list[Diagnostic] = []
    for parsed in traces:
        diags.extend(_replay_one(parsed, catalog))
    return diags


def _replay_one(trace: Trace, catalog: Catalog) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    binding = Binding()
    for step in trace.steps:
        message = catalog.messages.get(step.message)
        if message is None:
            diags.append(
                Diagnostic(
                    "error",
                    "E-UNRESOLVED",
                    f"trace step {step.step} references unknown message "
                    f"{step.message!r}",
                )
            )
            continue
        action = catalog.actions[message.action]
        for var, declared in message_slots(message, action):
            if binding.narrow(var, declared) is None:
                diags.append(
                    Diagnostic(
                        "error",
                        "E-BINDING",
                        f"step {step.step}: {var!r} is {binding.types[var]} "
                        f"but {message.name!r} uses it as {declared}",
                    )
                )
        for var, payload_json in step.produced.items():
            payload_type = parse_type(payload_json["type"])
            if binding.narrow(var, payload_type) is None:
                diags.append(
                    Diagnostic(
                        "error",
                        "E-BINDING",
                        f"step {step.step}: payload for {var!r} has type "
                        f"{payload_type}, expected {binding.types[var]}",
                    )
                )
    return diags

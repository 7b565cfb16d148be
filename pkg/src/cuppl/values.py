"""Runtime values.

Scalars are unboxed Python values: int, float, bool, str, and None for unit.
Tuples are Python tuples. Everything else is a small tagged wrapper. All
values are immutable; saved stack segments therefore copy slot references
safely.
"""

from __future__ import annotations

from .errors import TypeMismatchError


class Vector:
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)

    def __len__(self):
        return len(self.items)

    def __repr__(self):
        return f"Vector{self.items!r}"


class Constructor:
    __slots__ = ("tag", "payload")

    def __init__(self, tag, payload):
        self.tag = tag
        self.payload = payload

    def __repr__(self):
        return f"Ctor({self.tag}, {self.payload!r})"


class Closure:
    __slots__ = ("entry", "env")

    def __init__(self, entry, env):
        self.entry = entry
        self.env = env

    def __repr__(self):
        return f"<function @{self.entry}>"


class SavedStack:
    """An immutable captured stack segment; restoring copies its slots."""

    __slots__ = ("slots",)

    def __init__(self, slots):
        self.slots = tuple(slots)

    @property
    def count(self):
        return len(self.slots)

    def __repr__(self):
        return f"<saved-stack {len(self.slots)}>"


class Continuation:
    __slots__ = ("resume", "saved")

    def __init__(self, resume, saved):
        self.resume = resume
        self.saved = saved

    def __repr__(self):
        return f"<continuation @{self.resume}>"


class Label:
    __slots__ = ("pc",)

    def __init__(self, pc):
        self.pc = pc

    def __repr__(self):
        return f"<label {self.pc}>"


class DistValue:
    """Fixed-size distribution value: one tag and three payload slots."""

    __slots__ = ("tag", "p0", "p1", "p2")

    def __init__(self, tag, p0=0, p1=0, p2=0):
        self.tag = tag
        self.p0 = p0
        self.p1 = p1
        self.p2 = p2

    def __repr__(self):
        return f"<dist tag={self.tag} {self.p0} {self.p1} {self.p2}>"


def value_key(v):
    """Hashable structural key; distinct scalar types never collide."""
    if v is None:
        return ("u",)
    if v is True or v is False:
        return ("b", v)
    t = type(v)
    if t is int:
        return ("i", v)
    if t is float:
        return ("r", v)
    if t is str:
        return ("s", v)
    if t is tuple:
        return ("t",) + tuple(value_key(x) for x in v)
    if t is Vector:
        return ("v",) + tuple(value_key(x) for x in v.items)
    if t is Constructor:
        return ("c", v.tag, value_key(v.payload))
    if t is DistValue:
        return ("d", v.tag, value_key(v.p0), value_key(v.p1), value_key(v.p2))
    raise TypeMismatchError(f"value of kind {t.__name__} has no structural identity")


def value_eq(a, b):
    try:
        return value_key(a) == value_key(b)
    except TypeMismatchError:
        raise TypeMismatchError("cannot compare functions or continuations")


def render_value(v, ctor_names=None):
    """Human-readable form used by the CLI and posterior serialization."""
    if v is None:
        return "()"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return v
    if isinstance(v, tuple):
        return "(" + ", ".join(render_value(x, ctor_names) for x in v) + ")"
    if isinstance(v, Vector):
        return "[" + ", ".join(render_value(x, ctor_names) for x in v.items) + "]"
    if isinstance(v, Constructor):
        name = (ctor_names[v.tag][0] if ctor_names and v.tag < len(ctor_names)
                else f"#{v.tag}")
        if v.payload is None:
            return f"{name}()"
        if isinstance(v.payload, tuple):
            return f"{name}(" + ", ".join(render_value(x, ctor_names)
                                          for x in v.payload) + ")"
        return f"{name}({render_value(v.payload, ctor_names)})"
    if isinstance(v, Closure):
        return "<function>"
    if isinstance(v, Continuation):
        return "<continuation>"
    if isinstance(v, DistValue):
        return f"<dist:{v.tag}>"
    if isinstance(v, Label):
        return "<label>"
    return repr(v)


def json_value(v):
    """JSON-serializable form of a runtime value (posterior support)."""
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, tuple):
        return [json_value(x) for x in v]
    if isinstance(v, Vector):
        return [json_value(x) for x in v.items]
    if isinstance(v, Constructor):
        return {"tag": v.tag, "payload": json_value(v.payload)}
    raise TypeMismatchError(f"cannot serialize {type(v).__name__} to JSON")

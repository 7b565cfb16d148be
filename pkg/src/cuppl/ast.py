"""Abstract syntax: expression nodes, type declarations, surface type syntax.

Every expression node carries a SourceSpan so later stages can attribute
diagnostics to source positions.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        assert (self.start_line, self.start_col) <= (self.end_line, self.end_col), \
            "span start must not follow its end"

    def merge(self, other):
        lo = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        hi = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return SourceSpan(self.file, lo[0], lo[1], hi[0], hi[1])

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"


# --- surface type syntax ------------------------------------------------------

@dataclass(frozen=True)
class TypeExpr:
    pass


@dataclass(frozen=True)
class TName(TypeExpr):
    name: str  # int, real, bool, unit, string, or a declared type name


@dataclass(frozen=True)
class TVarRef(TypeExpr):
    name: str  # 'a in declarations, bare lowercase names in annotations


@dataclass(frozen=True)
class TDist(TypeExpr):
    elem: TypeExpr


@dataclass(frozen=True)
class TVec(TypeExpr):
    elem: TypeExpr


@dataclass(frozen=True)
class TTuple(TypeExpr):
    items: tuple


@dataclass(frozen=True)
class TApp(TypeExpr):
    name: str
    args: tuple


@dataclass(frozen=True)
class TArrow(TypeExpr):
    params: tuple
    ret: TypeExpr
    arg_answer: TypeExpr | None = None
    ret_answer: TypeExpr | None = None


@dataclass(frozen=True)
class TSum(TypeExpr):
    ctors: tuple  # of (label, payload TypeExpr)


# --- expressions --------------------------------------------------------------

_node_counter = [0]


def _fresh_node_id():
    _node_counter[0] += 1
    return _node_counter[0]


@dataclass
class Expr:
    span: SourceSpan = field(repr=False, compare=False)
    node_id: int = field(default_factory=_fresh_node_id, repr=False, compare=False)


@dataclass
class Literal(Expr):
    # value is one of: int, float, bool, None (unit), str
    value: object = None

    def lit_kind(self):
        v = self.value
        if v is None:
            return "unit"
        if isinstance(v, bool):
            return "bool"
        if isinstance(v, int):
            return "int"
        if isinstance(v, float):
            return "real"
        return "string"


@dataclass
class Var(Expr):
    name: str = ""


@dataclass
class Lambda(Expr):
    params: list = field(default_factory=list)  # of (name, TypeExpr | None)
    ret_ann: TypeExpr | None = None
    body: Expr | None = None


@dataclass
class Apply(Expr):
    callee: Expr | None = None
    args: list = field(default_factory=list)


@dataclass
class Bind(Expr):
    name: str = ""
    rhs: Expr | None = None
    body: Expr | None = None


@dataclass
class If(Expr):
    cond: Expr | None = None
    then: Expr | None = None
    orelse: Expr | None = None


@dataclass
class CaseArm:
    ctor: str
    binders: list
    body: Expr
    span: SourceSpan


@dataclass
class Case(Expr):
    scrutinee: Expr | None = None
    arms: list = field(default_factory=list)

    def __post_init__(self):
        pass


@dataclass
class Construct(Expr):
    ctor: str = ""
    args: list = field(default_factory=list)


@dataclass
class VectorLit(Expr):
    elements: list = field(default_factory=list)


@dataclass
class BinOp(Expr):
    op: str = ""  # + - * / % == != < <= > >= && || index
    lhs: Expr | None = None
    rhs: Expr | None = None


@dataclass
class UnaryOp(Expr):
    op: str = ""  # - !
    operand: Expr | None = None


@dataclass
class Shift(Expr):
    binder: str = ""
    binder_ann: TypeExpr | None = None
    result_ann: TypeExpr | None = None
    body: Expr | None = None


@dataclass
class Reset(Expr):
    body: Expr | None = None


# --- programs -----------------------------------------------------------------

@dataclass
class TypeDecl:
    name: str
    params: list  # of type-variable names ('a, ...)
    ctors: list   # of (label, payload TypeExpr)
    span: SourceSpan


@dataclass
class Binding:
    name: str
    rhs: Expr
    span: SourceSpan
    prelude: bool = False


@dataclass
class Program:
    type_decls: list
    bindings: list
    result: Expr
    file: str = "<input>"

    def walk(self):
        """Yield every expression node in the program, bindings then result."""
        for b in self.bindings:
            yield from walk_expr(b.rhs)
        yield from walk_expr(self.result)


def children(e):
    if isinstance(e, Lambda):
        return [e.body]
    if isinstance(e, Apply):
        return [e.callee, *e.args]
    if isinstance(e, Bind):
        return [e.rhs, e.body]
    if isinstance(e, If):
        return [e.cond, e.then, e.orelse]
    if isinstance(e, Case):
        return [e.scrutinee, *[a.body for a in e.arms]]
    if isinstance(e, Construct):
        return list(e.args)
    if isinstance(e, VectorLit):
        return list(e.elements)
    if isinstance(e, BinOp):
        return [e.lhs, e.rhs]
    if isinstance(e, UnaryOp):
        return [e.operand]
    if isinstance(e, Shift):
        return [e.body]
    if isinstance(e, Reset):
        return [e.body]
    return []


def walk_expr(e):
    yield e
    for c in children(e):
        yield from walk_expr(c)


def structurally_equal(a, b):
    """Structural equality on expression trees, ignoring spans and node ids."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Literal):
        return type(a.value) is type(b.value) and a.value == b.value
    if isinstance(a, Var):
        return a.name == b.name
    if isinstance(a, Lambda):
        return ([p[0] for p in a.params] == [p[0] for p in b.params]
                and [p[1] for p in a.params] == [p[1] for p in b.params]
                and a.ret_ann == b.ret_ann
                and structurally_equal(a.body, b.body))
    if isinstance(a, Apply):
        return (structurally_equal(a.callee, b.callee) and len(a.args) == len(b.args)
                and all(structurally_equal(x, y) for x, y in zip(a.args, b.args)))
    if isinstance(a, Bind):
        return (a.name == b.name and structurally_equal(a.rhs, b.rhs)
                and structurally_equal(a.body, b.body))
    if isinstance(a, If):
        return (structurally_equal(a.cond, b.cond) and structurally_equal(a.then, b.then)
                and structurally_equal(a.orelse, b.orelse))
    if isinstance(a, Case):
        if not structurally_equal(a.scrutinee, b.scrutinee) or len(a.arms) != len(b.arms):
            return False
        return all(x.ctor == y.ctor and x.binders == y.binders
                   and structurally_equal(x.body, y.body)
                   for x, y in zip(a.arms, b.arms))
    if isinstance(a, Construct):
        return (a.ctor == b.ctor and len(a.args) == len(b.args)
                and all(structurally_equal(x, y) for x, y in zip(a.args, b.args)))
    if isinstance(a, VectorLit):
        return (len(a.elements) == len(b.elements)
                and all(structurally_equal(x, y) for x, y in zip(a.elements, b.elements)))
    if isinstance(a, BinOp):
        return (a.op == b.op and structurally_equal(a.lhs, b.lhs)
                and structurally_equal(a.rhs, b.rhs))
    if isinstance(a, UnaryOp):
        return a.op == b.op and structurally_equal(a.operand, b.operand)
    if isinstance(a, Shift):
        return (a.binder == b.binder and a.binder_ann == b.binder_ann
                and a.result_ann == b.result_ann and structurally_equal(a.body, b.body))
    if isinstance(a, Reset):
        return structurally_equal(a.body, b.body)
    raise TypeError(f"unknown node {type(a)}")


def programs_equal(p, q):
    if len(p.type_decls) != len(q.type_decls) or len(p.bindings) != len(q.bindings):
        return False
    for d, e in zip(p.type_decls, q.type_decls):
        if (d.name, d.params, d.ctors) != (e.name, e.params, e.ctors):
            return False
    for b, c in zip(p.bindings, q.bindings):
        if b.name != c.name or not structurally_equal(b.rhs, c.rhs):
            return False
    return structurally_equal(p.result, q.result)


def clone_expr(e):
    """Deep copy of an expression with fresh node ids (spans preserved)."""
    rep = {f.name: getattr(e, f.name) for f in dataclasses.fields(e)
           if f.name != "node_id"}
    if isinstance(e, Case):
        rep["arms"] = [CaseArm(a.ctor, list(a.binders), clone_expr(a.body), a.span)
                       for a in e.arms]
        rep["scrutinee"] = clone_expr(e.scrutinee)
    else:
        for name, val in list(rep.items()):
            if isinstance(val, Expr):
                rep[name] = clone_expr(val)
            elif isinstance(val, list) and val and isinstance(val[0], Expr):
                rep[name] = [clone_expr(v) for v in val]
    return type(e)(**rep)

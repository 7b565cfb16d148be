"""Type inference: Hindley-Milner with answer-typed judgments.

A judgment is written here as infer(env, e, a_after) -> (t, a_before): the
expression has type t, and evaluating it moves the answer type of the
enclosing delimiter from a_before (at its start) to a_after (at its end).
Pure expressions thread the answer variable through untouched, which is how
the purity of a judgment is detected.

The answer type "bottom" (rendered ⊥) marks judgments with no delimiter
obligation; it unifies only with itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import ast as A
from .errors import (NotConcreteError, OccursError, ShiftOutsideResetError,
                     TypeCheckError, UnifyError)

# --- type representation ------------------------------------------------------


class Type:
    __slots__ = ()


class TCon(Type):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, TCon) and other.name == self.name

    def __hash__(self):
        return hash(("TCon", self.name))


class TVar(Type):
    __slots__ = ("id", "numeric")

    def __init__(self, id, numeric=False):
        self.id = id
        self.numeric = numeric

    def __repr__(self):
        return f"'{'n' if self.numeric else 't'}{self.id}"


class TVector(Type):
    __slots__ = ("elem",)

    def __init__(self, elem):
        self.elem = elem

    def __repr__(self):
        return f"[{self.elem!r}]"


class TTupleT(Type):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)

    def __repr__(self):
        return "(" + ", ".join(map(repr, self.items)) + ")"


class TDistT(Type):
    __slots__ = ("elem",)

    def __init__(self, elem):
        self.elem = elem

    def __repr__(self):
        return f"~{self.elem!r}"


class TFun(Type):
    __slots__ = ("params", "arg_answer", "ret", "ret_answer")

    def __init__(self, params, arg_answer, ret, ret_answer):
        self.params = tuple(params)
        self.arg_answer = arg_answer
        self.ret = ret
        self.ret_answer = ret_answer

    def __repr__(self):
        ps = ", ".join(map(repr, self.params))
        return f"(({ps})/{self.arg_answer!r} => {self.ret!r}/{self.ret_answer!r})"


class TData(Type):
    __slots__ = ("name", "args")

    def __init__(self, name, args=()):
        self.name = name
        self.args = tuple(args)

    def __repr__(self):
        if not self.args:
            return self.name
        return f"({self.name} " + " ".join(map(repr, self.args)) + ")"


INT = TCon("int")
REAL = TCon("real")
BOOL = TCon("bool")
UNIT = TCon("unit")
STRING = TCon("string")
BOT = TCon("⊥")  # the empty answer type

_BASE = {"int": INT, "real": REAL, "bool": BOOL, "unit": UNIT, "string": STRING}


@dataclass(frozen=True)
class TypeScheme:
    qvars: tuple  # of TVar
    body: Type

    def __repr__(self):
        if not self.qvars:
            return repr(self.body)
        return "forall " + " ".join(map(repr, self.qvars)) + ". " + repr(self.body)


class TypeEnv:
    """Persistent identifier-to-scheme mapping; extension returns a new env."""

    __slots__ = ("_table",)

    def __init__(self, table=None):
        self._table = dict(table or {})

    def extend(self, name, scheme):
        new = dict(self._table)
        new[name] = scheme
        return TypeEnv(new)

    def lookup(self, name, span=None):
        try:
            return self._table[name]
        except KeyError:
            raise TypeCheckError(f"unbound identifier {name!r}", span) from None

    def __contains__(self, name):
        return name in self._table

    def items(self):
        return self._table.items()


# --- substitutions ------------------------------------------------------------

def walk(t, s):
    """Resolve the head of t through substitution s."""
    while isinstance(t, TVar):
        nxt = s.get(t.id)
        if nxt is None:
            return t
        t = nxt
    return t


def resolve(t, s):
    """Deeply apply substitution s to t."""
    t = walk(t, s)
    if isinstance(t, (TCon, TVar)):
        return t
    if isinstance(t, TVector):
        return TVector(resolve(t.elem, s))
    if isinstance(t, TTupleT):
        return TTupleT(resolve(x, s) for x in t.items)
    if isinstance(t, TDistT):
        return TDistT(resolve(t.elem, s))
    if isinstance(t, TFun):
        return TFun([resolve(p, s) for p in t.params], resolve(t.arg_answer, s),
                    resolve(t.ret, s), resolve(t.ret_answer, s))
    if isinstance(t, TData):
        return TData(t.name, [resolve(a, s) for a in t.args])
    raise TypeError(f"unknown type {t!r}")


def free_type_vars(t, s):
    t = walk(t, s)
    if isinstance(t, TVar):
        return {t.id: t}
    out = {}
    if isinstance(t, TVector):
        out.update(free_type_vars(t.elem, s))
    elif isinstance(t, TTupleT):
        for x in t.items:
            out.update(free_type_vars(x, s))
    elif isinstance(t, TDistT):
        out.update(free_type_vars(t.elem, s))
    elif isinstance(t, TFun):
        for p in t.params:
            out.update(free_type_vars(p, s))
        out.update(free_type_vars(t.arg_answer, s))
        out.update(free_type_vars(t.ret, s))
        out.update(free_type_vars(t.ret_answer, s))
    elif isinstance(t, TData):
        for a in t.args:
            out.update(free_type_vars(a, s))
    return out


def _occurs(vid, t, s):
    t = walk(t, s)
    if isinstance(t, TVar):
        return t.id == vid
    if isinstance(t, TVector):
        return _occurs(vid, t.elem, s)
    if isinstance(t, TTupleT):
        return any(_occurs(vid, x, s) for x in t.items)
    if isinstance(t, TDistT):
        return _occurs(vid, t.elem, s)
    if isinstance(t, TFun):
        return (any(_occurs(vid, p, s) for p in t.params)
                or _occurs(vid, t.arg_answer, s) or _occurs(vid, t.ret, s)
                or _occurs(vid, t.ret_answer, s))
    if isinstance(t, TData):
        return any(_occurs(vid, a, s) for a in t.args)
    return False


def _bind(v, t, s):
    if isinstance(t, TVar) and t.id == v.id:
        return
    if _occurs(v.id, t, s):
        raise OccursError(f"type variable {v!r} occurs in {resolve(t, s)!r}")
    if v.numeric:
        t_h = walk(t, s)
        if isinstance(t_h, TVar):
            if not t_h.numeric:
                # keep the numeric constraint as the representative
                s[t_h.id] = v
                return
        elif t_h not in (INT, REAL):
            raise UnifyError(f"numeric type expected, found {resolve(t, s)!r}")
    s[v.id] = t


def unify_into(t1, t2, s):
    """Destructively extend substitution s so that t1 and t2 agree."""
    a = walk(t1, s)
    b = walk(t2, s)
    if isinstance(a, TVar):
        _bind(a, b, s)
        return
    if isinstance(b, TVar):
        _bind(b, a, s)
        return
    if isinstance(a, TCon) and isinstance(b, TCon):
        if a.name != b.name:
            raise UnifyError(f"cannot unify {a!r} with {b!r}")
        return
    if isinstance(a, TVector) and isinstance(b, TVector):
        unify_into(a.elem, b.elem, s)
        return
    if isinstance(a, TDistT) and isinstance(b, TDistT):
        unify_into(a.elem, b.elem, s)
        return
    if isinstance(a, TTupleT) and isinstance(b, TTupleT):
        if len(a.items) != len(b.items):
            raise UnifyError(f"tuple sizes differ: {resolve(a, s)!r} vs {resolve(b, s)!r}")
        for x, y in zip(a.items, b.items):
            unify_into(x, y, s)
        return
    if isinstance(a, TFun) and isinstance(b, TFun):
        if len(a.params) != len(b.params):
            raise UnifyError(
                f"function arity differs: {len(a.params)} vs {len(b.params)}")
        for x, y in zip(a.params, b.params):
            unify_into(x, y, s)
        unify_into(a.arg_answer, b.arg_answer, s)
        unify_into(a.ret, b.ret, s)
        unify_into(a.ret_answer, b.ret_answer, s)
        return
    if isinstance(a, TData) and isinstance(b, TData):
        if a.name != b.name or len(a.args) != len(b.args):
            raise UnifyError(f"cannot unify {resolve(a, s)!r} with {resolve(b, s)!r}")
        for x, y in zip(a.args, b.args):
            unify_into(x, y, s)
        return
    raise UnifyError(f"cannot unify {resolve(a, s)!r} with {resolve(b, s)!r}")


def unify(t1, t2, s):
    """Functional unification: returns a substitution extending s."""
    s2 = dict(s)
    unify_into(t1, t2, s2)
    return s2


# --- fresh variables, schemes ---------------------------------------------------

class VarSupply:
    def __init__(self):
        self._counter = itertools.count()

    def fresh(self, numeric=False):
        return TVar(next(self._counter), numeric)


def instantiate(scheme, supply, s):
    """Replace quantified variables with fresh ones; returns (type, fresh list)."""
    if not scheme.qvars:
        return scheme.body, []
    fresh = [supply.fresh(q.numeric) for q in scheme.qvars]
    mapping = {q.id: f for q, f in zip(scheme.qvars, fresh)}

    def sub(t):
        t = walk(t, s)
        if isinstance(t, TVar):
            return mapping.get(t.id, t)
        if isinstance(t, TCon):
            return t
        if isinstance(t, TVector):
            return TVector(sub(t.elem))
        if isinstance(t, TTupleT):
            return TTupleT(sub(x) for x in t.items)
        if isinstance(t, TDistT):
            return TDistT(sub(t.elem))
        if isinstance(t, TFun):
            return TFun([sub(p) for p in t.params], sub(t.arg_answer),
                        sub(t.ret), sub(t.ret_answer))
        if isinstance(t, TData):
            return TData(t.name, [sub(a) for a in t.args])
        raise TypeError(t)

    return sub(scheme.body), fresh


def generalize(env, t, s):
    """Quantify variables free in t but not free in env."""
    env_free = {}
    for _, scheme in env.items():
        bound = {q.id for q in scheme.qvars}
        for vid, v in free_type_vars(scheme.body, s).items():
            if vid not in bound:
                env_free[vid] = v
    qvars = [v for vid, v in sorted(free_type_vars(t, s).items())
             if vid not in env_free]
    return TypeScheme(tuple(qvars), resolve(t, s))


def mono(t):
    return TypeScheme((), t)


# --- declarations ----------------------------------------------------------------

@dataclass
class CtorInfo:
    decl_name: str
    tag: int
    payload_template: Type  # may contain TVar placeholders for decl params
    param_vars: tuple       # the placeholder TVars, in decl order


@dataclass
class DeclTable:
    decls: dict = field(default_factory=dict)   # name -> (param_vars, [(label, payload)])
    ctors: dict = field(default_factory=dict)   # label -> CtorInfo

    def arity(self, name):
        return len(self.decls[name][0])


def build_decl_table(type_decls, supply):
    table = DeclTable()
    for d in type_decls:
        if d.name in table.decls:
            raise TypeCheckError(f"duplicate type declaration {d.name}", d.span)
        params = tuple(supply.fresh() for _ in d.params)
        scope = dict(zip(d.params, params))
        payloads = []
        for label, payload_syntax in d.ctors:
            if label in table.ctors:
                raise TypeCheckError(f"duplicate constructor {label}", d.span)
            payloads.append((label, payload_syntax))
        table.decls[d.name] = (params, [])
        # payload elaboration happens after registering the decl so that
        # recursive references to it resolve
        elaborated = []
        for tag, (label, payload_syntax) in enumerate(payloads):
            payload = _elab_decl_type(payload_syntax, scope, table, d.span)
            elaborated.append((label, payload))
            table.ctors[label] = CtorInfo(d.name, tag, payload, params)
        table.decls[d.name] = (params, elaborated)
    return table


def _elab_decl_type(t, scope, table, span):
    if isinstance(t, A.TName):
        base = _BASE.get(t.name)
        if base is None:
            raise TypeCheckError(f"unknown type {t.name}", span)
        return base
    if isinstance(t, A.TVarRef):
        if t.name not in scope:
            raise TypeCheckError(f"unbound type variable '{t.name}", span)
        return scope[t.name]
    if isinstance(t, A.TDist):
        return TDistT(_elab_decl_type(t.elem, scope, table, span))
    if isinstance(t, A.TVec):
        return TVector(_elab_decl_type(t.elem, scope, table, span))
    if isinstance(t, A.TTuple):
        return TTupleT(_elab_decl_type(x, scope, table, span) for x in t.items)
    if isinstance(t, A.TApp):
        if t.name not in table.decls:
            raise TypeCheckError(f"unknown type constructor {t.name}", span)
        args = [_elab_decl_type(a, scope, table, span) for a in t.args]
        expected = len(table.decls[t.name][0])
        if len(args) != expected:
            raise TypeCheckError(
                f"type {t.name} expects {expected} argument(s), got {len(args)}", span)
        return TData(t.name, args)
    if isinstance(t, A.TArrow):
        raise TypeCheckError("function types are not allowed in constructor payloads", span)
    raise TypeCheckError(f"bad type syntax {t!r}", span)


# --- inference -------------------------------------------------------------------

@dataclass
class VarUse:
    name: str
    qvars: tuple      # the scheme's quantified vars at the definition
    fresh: tuple      # the fresh vars this use instantiated them with
    top_level: bool   # refers to a top-level binding (or builtin)


@dataclass
class TypedProgram:
    program: A.Program
    decl_table: DeclTable
    binding_schemes: dict        # top-level name -> TypeScheme
    subst: dict
    node_types: dict             # node_id -> Type (unresolved; resolve with subst)
    node_answers: dict           # node_id -> (a_after, a_before)
    var_uses: dict               # node_id -> VarUse
    index_ops: dict              # node_id -> ("tuple", i) | ("vector",)
    bind_schemes: dict           # node_id of inner Bind -> TypeScheme | None
    builtin_names: frozenset
    reachable: dict = None       # set by check_monomorphic

    def type_of(self, node_id):
        return resolve(self.node_types[node_id], self.subst)


class Inferencer:
    def __init__(self, decl_table, builtin_schemes):
        self.supply = VarSupply()
        self.s = {}
        self.decl_table = decl_table
        self.builtins = builtin_schemes
        self.node_types = {}
        self.node_answers = {}
        self.var_uses = {}
        self.index_ops = {}
        self.bind_schemes = {}
        self.ann_scope = {}
        self.top_names = set()

    # -- surface type elaboration (annotation position) --

    def elab(self, t, span):
        if t is None:
            return self.supply.fresh()
        if isinstance(t, A.TName):
            base = _BASE.get(t.name)
            if base is None:
                raise TypeCheckError(f"unknown type {t.name}", span)
            return base
        if isinstance(t, A.TVarRef):
            return self.ann_scope.setdefault(t.name, self.supply.fresh())
        if isinstance(t, A.TDist):
            return TDistT(self.elab(t.elem, span))
        if isinstance(t, A.TVec):
            return TVector(self.elab(t.elem, span))
        if isinstance(t, A.TTuple):
            return TTupleT(self.elab(x, span) for x in t.items)
        if isinstance(t, A.TApp):
            if t.name not in self.decl_table.decls:
                raise TypeCheckError(f"unknown type constructor {t.name}", span)
            expected = self.decl_table.arity(t.name)
            args = [self.elab(a, span) for a in t.args]
            if len(args) != expected:
                raise TypeCheckError(
                    f"type {t.name} expects {expected} argument(s), got {len(args)}",
                    span)
            return TData(t.name, args)
        if isinstance(t, A.TArrow):
            params = [self.elab(p, span) for p in t.params]
            aa = self.elab(t.arg_answer, span) if t.arg_answer else self.supply.fresh()
            ra = self.elab(t.ret_answer, span) if t.ret_answer else self.supply.fresh()
            return TFun(params, aa, self.elab(t.ret, span), ra)
        raise TypeCheckError(f"bad type syntax {t!r}", span)

    # -- helpers --

    def unify(self, t1, t2, span, rule=None):
        try:
            unify_into(t1, t2, self.s)
        except (UnifyError, OccursError) as exc:
            raise TypeCheckError(str(exc), span, rule=rule) from exc

    def instantiate_ctor(self, label, span):
        info = self.decl_table.ctors.get(label)
        if info is None:
            raise TypeCheckError(f"unknown constructor {label}", span)
        fresh = [self.supply.fresh() for _ in info.param_vars]
        mapping = {p.id: f for p, f in zip(info.param_vars, fresh)}

        def sub(t):
            if isinstance(t, TVar):
                return mapping.get(t.id, t)
            if isinstance(t, TCon):
                return t
            if isinstance(t, TVector):
                return TVector(sub(t.elem))
            if isinstance(t, TTupleT):
                return TTupleT(sub(x) for x in t.items)
            if isinstance(t, TDistT):
                return TDistT(sub(t.elem))
            if isinstance(t, TData):
                return TData(t.name, [sub(a) for a in t.args])
            raise TypeError(t)

        return info, sub(info.payload_template), TData(info.decl_name, fresh)

    def judged(self, e, t, a_after, a_before):
        self.node_types[e.node_id] = t
        self.node_answers[e.node_id] = (a_after, a_before)
        return t, a_before

    def is_pure_judgment(self, a_after, a_before):
        a = walk(a_after, self.s)
        b = walk(a_before, self.s)
        if isinstance(a, TVar) and isinstance(b, TVar):
            return a.id == b.id
        return _types_identical(resolve(a, self.s), resolve(b, self.s))

    # -- the judgment --

    def infer(self, env, e, a_after):
        if isinstance(e, A.Literal):
            t = _BASE[e.lit_kind()]
            return self.judged(e, t, a_after, a_after)

        if isinstance(e, A.Var):
            scheme, top = self._lookup(env, e)
            t, fresh = instantiate(scheme, self.supply, self.s)
            self.var_uses[e.node_id] = VarUse(e.name, scheme.qvars, tuple(fresh), top)
            return self.judged(e, t, a_after, a_after)

        if isinstance(e, A.Lambda):
            inner = env
            param_ts = []
            for name, ann in e.params:
                pt = self.elab(ann, e.span)
                param_ts.append(pt)
                inner = inner.extend(name, mono(pt))
            a1 = self.supply.fresh()
            t_body, a2 = self.infer(inner, e.body, a1)
            if e.ret_ann is not None:
                self.unify(t_body, self.elab(e.ret_ann, e.span), e.span, rule="lambda")
            arrow = TFun(param_ts, a1, t_body, a2)
            return self.judged(e, arrow, a_after, a_after)

        if isinstance(e, A.Apply):
            t_ret = self.supply.fresh()
            a_ret = self.supply.fresh()
            thread = a_ret
            arg_ts = [None] * len(e.args)
            for i in range(len(e.args) - 1, -1, -1):
                arg_ts[i], thread = self.infer(env, e.args[i], thread)
            t_f, before = self.infer(env, e.callee, thread)
            self.unify(t_f, TFun(arg_ts, a_after, t_ret, a_ret), e.span, rule="apply")
            return self.judged(e, t_ret, a_after, before)

        if isinstance(e, A.Bind):
            a_r = self.supply.fresh()
            t_rhs, rhs_before = self.infer(env, e.rhs, a_r)
            pure = self.is_pure_judgment(a_r, rhs_before)
            if pure and e.name != "_":
                scheme = generalize(env, t_rhs, self.s)
            else:
                scheme = mono(t_rhs)
            self.bind_schemes[e.node_id] = scheme
            t_body, body_before = self.infer(env.extend(e.name, scheme), e.body, a_after)
            self.unify(a_r, body_before, e.span)
            return self.judged(e, t_body, a_after, rhs_before)

        if isinstance(e, A.If):
            t_then, before_t = self.infer(env, e.then, a_after)
            t_else, before_e = self.infer(env, e.orelse, a_after)
            self.unify(t_then, t_else, e.span, rule="if")
            self.unify(before_t, before_e, e.span, rule="if")
            t_c, before_c = self.infer(env, e.cond, before_t)
            self.unify(t_c, BOOL, e.cond.span, rule="if")
            return self.judged(e, t_then, a_after, before_c)

        if isinstance(e, A.Case):
            first = e.arms[0]
            info0 = self.decl_table.ctors.get(first.ctor)
            if info0 is None:
                raise TypeCheckError(f"unknown constructor {first.ctor}", first.span)
            fresh = [self.supply.fresh() for _ in info0.param_vars]
            scrut_t = TData(info0.decl_name, fresh)
            t_res = self.supply.fresh()
            before_common = None
            for arm in e.arms:
                info, payload, data_t = self.instantiate_ctor(arm.ctor, arm.span)
                if info.decl_name != info0.decl_name:
                    raise TypeCheckError(
                        f"constructor {arm.ctor} belongs to {info.decl_name}, "
                        f"not {info0.decl_name}", arm.span, rule="case")
                self.unify(data_t, scrut_t, arm.span, rule="case")
                inner = env
                payload_r = walk(payload, self.s)
                if not arm.binders:
                    self.unify(payload, UNIT, arm.span, rule="case")
                elif len(arm.binders) == 1:
                    inner = inner.extend(arm.binders[0], mono(payload))
                elif isinstance(payload_r, TTupleT) and len(payload_r.items) == len(arm.binders):
                    for b, pt in zip(arm.binders, payload_r.items):
                        inner = inner.extend(b, mono(pt))
                else:
                    raise TypeCheckError(
                        f"constructor {arm.ctor} pattern has {len(arm.binders)} "
                        f"binder(s) but payload is {resolve(payload, self.s)!r}",
                        arm.span, rule="case")
                t_arm, before_arm = self.infer(inner, arm.body, a_after)
                self.unify(t_arm, t_res, arm.span, rule="case")
                if before_common is None:
                    before_common = before_arm
                else:
                    self.unify(before_arm, before_common, arm.span, rule="case")
            t_s, before_s = self.infer(env, e.scrutinee, before_common)
            self.unify(t_s, scrut_t, e.scrutinee.span, rule="case")
            return self.judged(e, t_res, a_after, before_s)

        if isinstance(e, A.Construct):
            info, payload, data_t = self.instantiate_ctor(e.ctor, e.span)
            thread = a_after
            arg_ts = [None] * len(e.args)
            for i in range(len(e.args) - 1, -1, -1):
                arg_ts[i], thread = self.infer(env, e.args[i], thread)
            if len(e.args) == 0:
                self.unify(payload, UNIT, e.span, rule="construct")
            elif len(e.args) == 1:
                self.unify(payload, arg_ts[0], e.span, rule="construct")
            else:
                self.unify(payload, TTupleT(arg_ts), e.span, rule="construct")
            return self.judged(e, data_t, a_after, thread)

        if isinstance(e, A.VectorLit):
            elem_t = self.supply.fresh()
            thread = a_after
            for i in range(len(e.elements) - 1, -1, -1):
                t_i, thread = self.infer(env, e.elements[i], thread)
                self.unify(t_i, elem_t, e.elements[i].span, rule="vector")
            return self.judged(e, TVector(elem_t), a_after, thread)

        if isinstance(e, A.BinOp):
            return self._infer_binop(env, e, a_after)

        if isinstance(e, A.UnaryOp):
            t_o, before = self.infer(env, e.operand, a_after)
            if e.op == "-":
                nv = self.supply.fresh(numeric=True)
                self.unify(t_o, nv, e.span, rule="arith")
                return self.judged(e, nv, a_after, before)
            self.unify(t_o, BOOL, e.span, rule="bool")
            return self.judged(e, BOOL, a_after, before)

        if isinstance(e, A.Shift):
            hole = self.supply.fresh()
            alpha = a_after
            qv = self.supply.fresh()
            k_scheme = TypeScheme((qv,), TFun([hole], qv, alpha, qv))
            if e.binder_ann is not None:
                ann_t = self.elab(e.binder_ann, e.span)
                k_inst, _ = instantiate(k_scheme, self.supply, self.s)
                self.unify(ann_t, k_inst, e.span, rule="shift")
            tau2 = self.elab(e.result_ann, e.span) if e.result_ann else self.supply.fresh()
            t_body, before = self.infer(env.extend(e.binder, k_scheme), e.body, tau2)
            self.unify(t_body, tau2, e.span, rule="shift")
            return self.judged(e, hole, a_after, before)

        if isinstance(e, A.Reset):
            alpha = self.supply.fresh()
            t_body, before = self.infer(env, e.body, alpha)
            self.unify(t_body, alpha, e.span, rule="reset")
            return self.judged(e, before, a_after, a_after)

        raise TypeCheckError(f"cannot type node {type(e).__name__}", e.span)

    def _lookup(self, env, e):
        if e.name in env:
            return env.lookup(e.name, e.span), (e.name in self.top_names)
        if e.name in self.builtins:
            return self.builtins[e.name], True
        raise TypeCheckError(f"unbound identifier {e.name!r}", e.span)

    def _infer_binop(self, env, e, a_after):
        op = e.op
        if op == "index":
            placeholder = self.supply.fresh()
            t_l, before_l = self.infer(env, e.lhs, placeholder)
            t_idx, before_idx = self.infer(env, e.rhs, a_after)
            self.unify(placeholder, before_idx, e.span)
            lhs_t = walk(t_l, self.s)
            if isinstance(lhs_t, TTupleT):
                if not (isinstance(e.rhs, A.Literal) and isinstance(e.rhs.value, int)
                        and not isinstance(e.rhs.value, bool)):
                    raise TypeCheckError("tuple index must be an integer literal",
                                         e.rhs.span, rule="index")
                i = e.rhs.value
                if not 0 <= i < len(lhs_t.items):
                    raise TypeCheckError(
                        f"tuple index {i} out of range for {resolve(lhs_t, self.s)!r}",
                        e.rhs.span, rule="index")
                self.index_ops[e.node_id] = ("tuple", i)
                return self.judged(e, lhs_t.items[i], a_after, before_l)
            self.unify(t_idx, INT, e.rhs.span, rule="index")
            elem = self.supply.fresh()
            self.unify(t_l, TVector(elem), e.lhs.span, rule="index")
            self.index_ops[e.node_id] = ("vector",)
            return self.judged(e, elem, a_after, before_l)

        if op in ("&&", "||"):
            # threads like the equivalent conditional; both sides bool
            t_r, before_r = self.infer(env, e.rhs, a_after)
            self.unify(t_r, BOOL, e.rhs.span, rule="bool")
            self.unify(before_r, a_after, e.span, rule="bool")
            t_l, before_l = self.infer(env, e.lhs, a_after)
            self.unify(t_l, BOOL, e.lhs.span, rule="bool")
            return self.judged(e, BOOL, a_after, before_l)

        t_r, thread = self.infer(env, e.rhs, a_after)
        t_l, before = self.infer(env, e.lhs, thread)
        if op in ("+", "-", "*", "/", "%"):
            nv = self.supply.fresh(numeric=True)
            self.unify(t_l, nv, e.lhs.span, rule="arith")
            self.unify(t_r, nv, e.rhs.span, rule="arith")
            return self.judged(e, nv, a_after, before)
        if op in ("<", "<=", ">", ">="):
            nv = self.supply.fresh(numeric=True)
            self.unify(t_l, nv, e.lhs.span, rule="compare")
            self.unify(t_r, nv, e.rhs.span, rule="compare")
            return self.judged(e, BOOL, a_after, before)
        if op in ("==", "!="):
            self.unify(t_l, t_r, e.span, rule="equality")
            return self.judged(e, BOOL, a_after, before)
        raise TypeCheckError(f"unknown operator {op}", e.span)


def _types_identical(a, b):
    if isinstance(a, TVar) and isinstance(b, TVar):
        return a.id == b.id
    if type(a) is not type(b):
        return False
    if isinstance(a, TCon):
        return a.name == b.name
    if isinstance(a, TVector) or isinstance(a, TDistT):
        return _types_identical(a.elem, b.elem)
    if isinstance(a, TTupleT):
        return (len(a.items) == len(b.items)
                and all(_types_identical(x, y) for x, y in zip(a.items, b.items)))
    if isinstance(a, TFun):
        return (len(a.params) == len(b.params)
                and all(_types_identical(x, y) for x, y in zip(a.params, b.params))
                and _types_identical(a.arg_answer, b.arg_answer)
                and _types_identical(a.ret, b.ret)
                and _types_identical(a.ret_answer, b.ret_answer))
    if isinstance(a, TData):
        return (a.name == b.name and len(a.args) == len(b.args)
                and all(_types_identical(x, y) for x, y in zip(a.args, b.args)))
    return False


def infer_program(program, builtin_schemes):
    """Infer types for a whole program; returns a TypedProgram."""
    supply = VarSupply()
    decl_table = build_decl_table(program.type_decls, supply)
    inf = Inferencer(decl_table, builtin_schemes)
    inf.supply = supply
    env = TypeEnv()
    schemes = {}
    for b in program.bindings:
        inf.ann_scope = {}
        inf.top_names.add(b.name)
        self_var = supply.fresh()
        rec_env = env.extend(b.name, mono(self_var))
        a = supply.fresh()
        t, before = inf.infer(rec_env, b.rhs, a)
        inf.unify(self_var, t, b.span)
        if not inf.is_pure_judgment(a, before):
            raise ShiftOutsideResetError(
                f"top-level binding {b.name!r} must not capture the top level "
                "(its control effect has no enclosing reset)", b.span)
        scheme = generalize(env, t, inf.s)
        schemes[b.name] = scheme
        env = env.extend(b.name, scheme)
    inf.ann_scope = {}
    a = supply.fresh()
    t, before = inf.infer(env, program.result, a)
    if not inf.is_pure_judgment(a, before):
        raise ShiftOutsideResetError(
            "the program result must not capture the top level "
            "(its control effect has no enclosing reset)", program.result.span)
    return TypedProgram(
        program=program,
        decl_table=decl_table,
        binding_schemes=schemes,
        subst=inf.s,
        node_types=inf.node_types,
        node_answers=inf.node_answers,
        var_uses=inf.var_uses,
        index_ops=inf.index_ops,
        bind_schemes=inf.bind_schemes,
        builtin_names=frozenset(builtin_schemes),
    )


# --- concreteness check ------------------------------------------------------------

def _type_key(t):
    if isinstance(t, TCon):
        return t.name
    if isinstance(t, TVar):
        return ("var", t.id)
    if isinstance(t, TVector):
        return ("vec", _type_key(t.elem))
    if isinstance(t, TTupleT):
        return ("tup",) + tuple(_type_key(x) for x in t.items)
    if isinstance(t, TDistT):
        return ("dist", _type_key(t.elem))
    if isinstance(t, TFun):
        return ("fun", tuple(_type_key(p) for p in t.params), _type_key(t.arg_answer),
                _type_key(t.ret), _type_key(t.ret_answer))
    if isinstance(t, TData):
        return ("data", t.name) + tuple(_type_key(a) for a in t.args)
    raise TypeError(t)


def _resolve_theta(t, s, theta):
    t = walk(t, s)
    if isinstance(t, TVar):
        got = theta.get(t.id)
        return t if got is None else got
    if isinstance(t, TCon):
        return t
    if isinstance(t, TVector):
        return TVector(_resolve_theta(t.elem, s, theta))
    if isinstance(t, TTupleT):
        return TTupleT(_resolve_theta(x, s, theta) for x in t.items)
    if isinstance(t, TDistT):
        return TDistT(_resolve_theta(t.elem, s, theta))
    if isinstance(t, TFun):
        return TFun([_resolve_theta(p, s, theta) for p in t.params],
                    _resolve_theta(t.arg_answer, s, theta),
                    _resolve_theta(t.ret, s, theta),
                    _resolve_theta(t.ret_answer, s, theta))
    if isinstance(t, TData):
        return TData(t.name, [_resolve_theta(a, s, theta) for a in t.args])
    raise TypeError(t)


def _var_roles(t, roles, in_answer_slot=False):
    if isinstance(t, TVar):
        role = "answer" if in_answer_slot else "value"
        prev = roles.get(t.id)
        roles[t.id] = role if prev in (None, role) else "value"
        return
    if isinstance(t, (TVector, TDistT)):
        _var_roles(t.elem, roles)
    elif isinstance(t, TTupleT):
        for x in t.items:
            _var_roles(x, roles)
    elif isinstance(t, TFun):
        for p in t.params:
            _var_roles(p, roles)
        _var_roles(t.ret, roles)
        _var_roles(t.arg_answer, roles, in_answer_slot=True)
        _var_roles(t.ret_answer, roles, in_answer_slot=True)


def default_type(t, span=None, strict=True):
    """Default leftover variables: numeric to int, answer-slot-only to the empty
    answer type. Any other free variable is not concrete."""
    roles = {}
    _var_roles(t, roles)

    def rw(x):
        if isinstance(x, TVar):
            if x.numeric:
                return INT
            if roles.get(x.id) == "answer":
                return BOT
            if strict:
                raise NotConcreteError(
                    "cannot determine a concrete type for this expression"
                    f" (type {x!r} is unconstrained)", span)
            return x
        if isinstance(x, TCon):
            return x
        if isinstance(x, TVector):
            return TVector(rw(x.elem))
        if isinstance(x, TTupleT):
            return TTupleT(rw(i) for i in x.items)
        if isinstance(x, TDistT):
            return TDistT(rw(x.elem))
        if isinstance(x, TFun):
            return TFun([rw(p) for p in x.params], rw(x.arg_answer), rw(x.ret),
                        rw(x.ret_answer))
        if isinstance(x, TData):
            return TData(x.name, [rw(a) for a in x.args])
        raise TypeError(x)

    return rw(t)


class _DemandChecker:
    def __init__(self, tp):
        self.tp = tp
        self.bindings = {b.name: b for b in tp.program.bindings}
        self.reachable = {}   # top-level name -> set of instantiation keys
        self.worklist = []

    def ground(self, t, theta, span):
        return default_type(_resolve_theta(t, self.tp.subst, theta), span)

    def check_node(self, e, theta):
        self.ground(self.tp.node_types[e.node_id], theta, e.span)

    def demand_top(self, name, inst_types, span):
        if name not in self.bindings:
            return  # builtin; its use-site type was already checked
        key = tuple(_type_key(t) for t in inst_types)
        seen = self.reachable.setdefault(name, set())
        if key not in seen:
            seen.add(key)
            scheme = self.tp.binding_schemes[name]
            theta = {q.id: t for q, t in zip(scheme.qvars, inst_types)}
            self.worklist.append((name, theta))

    def check_expr(self, e, theta, local_defs):
        self.check_node(e, theta)
        if isinstance(e, A.Var):
            use = self.tp.var_uses.get(e.node_id)
            if use is None:
                return
            inst = [self.ground(f, theta, e.span) for f in use.fresh]
            if e.name in local_defs:
                collector = local_defs[e.name]
                if collector is not None:
                    collector.add(tuple((_type_key(t), t) for t in inst))
            else:
                self.demand_top(e.name, inst, e.span)
            return
        if isinstance(e, A.Lambda):
            inner = dict(local_defs)
            for name, _ in e.params:
                inner[name] = None
            self.check_expr(e.body, theta, inner)
            return
        if isinstance(e, A.Bind):
            scheme = self.tp.bind_schemes.get(e.node_id)
            if scheme is not None and scheme.qvars:
                collected = set()
                inner = dict(local_defs)
                inner[e.name] = collected
                self.check_expr(e.body, theta, inner)
                for inst_key in collected:
                    theta2 = dict(theta)
                    for q, (_, t) in zip(scheme.qvars, inst_key):
                        theta2[q.id] = t
                    self.check_expr(e.rhs, theta2, local_defs)
                # an unused polymorphic binding is dead; its body is not checked
                return
            self.check_expr(e.rhs, theta, local_defs)
            inner = dict(local_defs)
            inner[e.name] = None
            self.check_expr(e.body, theta, inner)
            return
        if isinstance(e, A.Case):
            self.check_expr(e.scrutinee, theta, local_defs)
            for arm in e.arms:
                inner = dict(local_defs)
                for b in arm.binders:
                    inner[b] = None
                self.check_expr(arm.body, theta, inner)
            return
        if isinstance(e, A.Shift):
            inner = dict(local_defs)
            inner[e.binder] = None
            self.check_expr(e.body, theta, inner)
            return
        for c in A.children(e):
            self.check_expr(c, theta, local_defs)

    def run(self, extra_roots=()):
        self.check_expr(self.tp.program.result, {}, {})
        for name in extra_roots:
            if name in self.bindings:
                scheme = self.tp.binding_schemes[name]
                self.demand_top(name, [INT for _ in scheme.qvars], None)
        while self.worklist:
            name, theta = self.worklist.pop()
            self.check_expr(self.bindings[name].rhs, theta, {})
        return self.reachable


def check_monomorphic(typed_program, extra_roots=()):
    """Verify every demanded expression resolves to a concrete type.

    Walks the program demand-first from the result expression: each use of a
    polymorphic binding must supply a fully concrete instantiation, and every
    expression reached under those instantiations must have a concrete type
    after defaulting. Returns the reachability map (binding name to the set of
    demanded instantiations) and stores it on the TypedProgram; raises
    NotConcreteError otherwise. Unreferenced bindings are dead code and are
    not checked.
    """
    checker = _DemandChecker(typed_program)
    reachable = checker.run(extra_roots)
    typed_program.reachable = reachable
    return reachable


# --- rendering ---------------------------------------------------------------------

def render_type(t, names=None):
    """Human-readable type; arrows print as t1/a1 -> t2/a2."""
    if names is None:
        names = {}

    def name_of(v):
        if v.id not in names:
            idx = len(names)
            letters = "abcdefghijklmnopqrstuvwxyz"
            label = letters[idx % 26] + (str(idx // 26) if idx >= 26 else "")
            names[v.id] = ("'" + label) if not v.numeric else ("'num_" + label)
        return names[v.id]

    def go(x, wrap=False):
        if isinstance(x, TCon):
            return x.name
        if isinstance(x, TVar):
            return name_of(x)
        if isinstance(x, TVector):
            return f"[{go(x.elem)}]"
        if isinstance(x, TTupleT):
            return "(" + ", ".join(go(i) for i in x.items) + ")"
        if isinstance(x, TDistT):
            return f"~{go(x.elem, wrap=True)}"
        if isinstance(x, TFun):
            if len(x.params) == 1:
                lhs = go(x.params[0], wrap=True)
            else:
                lhs = "(" + ", ".join(go(p) for p in x.params) + ")"
            out = f"{lhs}/{go(x.arg_answer, wrap=True)} -> {go(x.ret, wrap=True)}/{go(x.ret_answer, wrap=True)}"
            return f"({out})" if wrap else out
        if isinstance(x, TData):
            if not x.args:
                return x.name
            return "(" + x.name + " " + " ".join(go(a, wrap=True) for a in x.args) + ")"
        raise TypeError(x)

    return go(t)


def render_scheme(scheme):
    names = {}
    body = render_type(scheme.body, names)
    return body

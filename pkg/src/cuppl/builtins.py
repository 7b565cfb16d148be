"""Built-in function catalog: names, arities, type schemes, dispatch kinds.

Kinds:
  host    executed by the VM via a host function
  inline  expanded to a bytecode loop at the call site (vector operators)
  hook    probabilistic hook dispatched to the installed inference handlers
  engine  runs a whole inference engine over a model closure

Scheme variables use negative ids so they can never collide with inference
variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .types import (BOOL, INT, REAL, UNIT, TDistT, TFun, TTupleT, TVar,
                    TVector, TypeScheme)

_neg_ids = itertools.count(-1, -1)


def _v(numeric=False):
    return TVar(next(_neg_ids), numeric)


def _scheme(builder):
    vars_used = []

    def fresh(numeric=False):
        t = _v(numeric)
        vars_used.append(t)
        return t

    body = builder(fresh)
    return TypeScheme(tuple(vars_used), body)


@dataclass(frozen=True)
class BuiltinInfo:
    name: str
    id: int
    arity: int
    kind: str
    scheme: TypeScheme | None  # None for internal-only builtins


def _pure_fn(params, ret, g):
    return TFun(params, g, ret, g)


def _catalog():
    defs = []

    def add(name, arity, kind, builder):
        defs.append((name, arity, kind, _scheme(builder) if builder else None))

    # numerics
    add("log", 1, "host", lambda f: _pure_fn([REAL], REAL, f()))
    add("exp", 1, "host", lambda f: _pure_fn([REAL], REAL, f()))
    add("sqrt", 1, "host", lambda f: _pure_fn([REAL], REAL, f()))
    add("pow", 2, "host", lambda f: _pure_fn([REAL, REAL], REAL, f()))
    add("abs", 1, "host", lambda f: (lambda n: _pure_fn([n], n, f()))(f(True)))
    add("floor", 1, "host", lambda f: _pure_fn([REAL], REAL, f()))
    add("to-real", 1, "host", lambda f: _pure_fn([INT], REAL, f()))
    add("to-int", 1, "host", lambda f: _pure_fn([REAL], INT, f()))

    # vectors
    add("length", 1, "host", lambda f: _pure_fn([TVector(f())], INT, f()))
    add("append", 2, "host",
        lambda f: (lambda a: _pure_fn([TVector(a), TVector(a)], TVector(a), f()))(f()))
    add("map", 2, "inline",
        lambda f: (lambda a, b, q: _pure_fn([TFun([a], q, b, q), TVector(a)],
                                            TVector(b), f()))(f(), f(), f()))
    add("repeat", 2, "inline",
        lambda f: (lambda a, q: _pure_fn([TFun([INT], q, a, q), INT],
                                         TVector(a), f()))(f(), f()))
    add("reduce", 3, "inline",
        lambda f: (lambda a, b, q: _pure_fn([TFun([b, a], q, b, q), b, TVector(a)],
                                            b, f()))(f(), f(), f()))
    add("filter", 2, "inline",
        lambda f: (lambda a, q: _pure_fn([TFun([a], q, BOOL, q), TVector(a)],
                                         TVector(a), f()))(f(), f()))

    # distribution constructors (numeric parameters accept int or real)
    add("normal", 2, "host", lambda f: _pure_fn([f(True), f(True)], TDistT(REAL), f()))
    add("bernoulli", 1, "host", lambda f: _pure_fn([f(True)], TDistT(BOOL), f()))
    add("poisson", 1, "host", lambda f: _pure_fn([f(True)], TDistT(INT), f()))
    add("uniform-discrete", 2, "host", lambda f: _pure_fn([INT, INT], TDistT(INT), f()))
    add("uniform-continuous", 2, "host",
        lambda f: _pure_fn([f(True), f(True)], TDistT(REAL), f()))
    add("beta", 2, "host", lambda f: _pure_fn([f(True), f(True)], TDistT(REAL), f()))
    add("exponential", 1, "host", lambda f: _pure_fn([f(True)], TDistT(REAL), f()))

    # distribution operations
    add("sample*", 1, "host", lambda f: (lambda a: _pure_fn([TDistT(a)], a, f()))(f()))
    add("dist-score", 2, "host",
        lambda f: (lambda a: _pure_fn([TDistT(a), a], REAL, f()))(f()))
    add("dist-var", 1, "host", lambda f: _pure_fn([TDistT(f())], REAL, f()))

    # inference hooks: the handler contract
    def sample_impl_scheme(f):
        a, b, t1, t2 = f(), f(), f(), f()
        k_in = TFun([a], t1, b, t1)
        k_out = TFun([a], t2, b, t2)
        return _pure_fn([TDistT(a), k_in], TTupleT([k_out, a]), f())

    def factor_impl_scheme(f):
        b, t1, t2 = f(), f(), f()
        return _pure_fn([REAL, TFun([UNIT], t1, b, t1)], TFun([UNIT], t2, b, t2), f())

    add("sample-impl", 2, "hook", sample_impl_scheme)
    add("factor-impl", 2, "hook", factor_impl_scheme)

    # inference engines over model closures
    def engine_scheme(f):
        a1, a2, t = f(), f(), f()
        return _pure_fn([TFun([UNIT], a1, t, a2), INT], TDistT(t), f())

    add("importance", 2, "engine", engine_scheme)
    add("mcmc", 2, "engine", engine_scheme)
    add("enumerate", 2, "engine", engine_scheme)

    # internal (no surface scheme)
    for name, arity in [
        ("__add", 2), ("__sub", 2), ("__mul", 2), ("__div", 2), ("__mod", 2),
        ("__neg", 1), ("__not", 1), ("__lt", 2), ("__le", 2), ("__gt", 2),
        ("__ge", 2), ("__eq", 2), ("__ne", 2), ("__vector", -1),
        ("__vec-index", 2), ("__tag-is", 2), ("__payload", 1),
        ("__match-fail", 0), ("__rev-list-vec", 1),
    ]:
        defs.append((name, arity, "host", None))

    table = {}
    for i, (name, arity, kind, scheme) in enumerate(defs):
        table[name] = BuiltinInfo(name, i, arity, kind, scheme)
    return table


BUILTINS = _catalog()
BUILTIN_SCHEMES = {name: info.scheme for name, info in BUILTINS.items()
                   if info.scheme is not None}
BUILTINS_BY_ID = {info.id: info for info in BUILTINS.values()}

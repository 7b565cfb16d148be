"""Post-parse rewrites.

- `observe(d, x)` becomes `factor(dist-score(d, x))`; no observe call remains.
- Zero-argument application `f()` passes an implicit unit, and parameterless
  functions take one ignored unit parameter, so arrows are never nullary.

Block statements are already nested into Bind chains by the parser, which
makes this pass idempotent by construction.
"""

from __future__ import annotations

from .ast import (Apply, Bind, Case, CaseArm, Construct, If, Lambda, Literal,
                  Program, Reset, Shift, TName, UnaryOp, Var, VectorLit, BinOp)

UNIT_PARAM = "_unit"


def desugar(program):
    """Rewrite a parsed Program; returns a new Program."""
    bindings = [type(b)(b.name, _rw(b.rhs), b.span, getattr(b, "prelude", False))
                for b in program.bindings]
    return Program(program.type_decls, bindings, _rw(program.result),
                   file=program.file)


def _rw(e):
    if isinstance(e, (Literal, Var)):
        return e
    if isinstance(e, Lambda):
        params = e.params or [(UNIT_PARAM, TName("unit"))]
        return Lambda(e.span, params=list(params), ret_ann=e.ret_ann,
                      body=_rw(e.body))
    if isinstance(e, Apply):
        callee = _rw(e.callee)
        args = [_rw(a) for a in e.args] or [Literal(e.span, value=None)]
        if isinstance(callee, Var) and callee.name == "observe" and len(args) == 2:
            score = Apply(e.span, callee=Var(e.span, name="dist-score"), args=args)
            return Apply(e.span, callee=Var(e.span, name="factor"), args=[score])
        return Apply(e.span, callee=callee, args=args)
    if isinstance(e, Bind):
        return Bind(e.span, name=e.name, rhs=_rw(e.rhs), body=_rw(e.body))
    if isinstance(e, If):
        return If(e.span, cond=_rw(e.cond), then=_rw(e.then), orelse=_rw(e.orelse))
    if isinstance(e, Case):
        arms = [CaseArm(a.ctor, list(a.binders), _rw(a.body), a.span) for a in e.arms]
        return Case(e.span, scrutinee=_rw(e.scrutinee), arms=arms)
    if isinstance(e, Construct):
        return Construct(e.span, ctor=e.ctor, args=[_rw(a) for a in e.args])
    if isinstance(e, VectorLit):
        return VectorLit(e.span, elements=[_rw(x) for x in e.elements])
    if isinstance(e, BinOp):
        return BinOp(e.span, op=e.op, lhs=_rw(e.lhs), rhs=_rw(e.rhs))
    if isinstance(e, UnaryOp):
        return UnaryOp(e.span, op=e.op, operand=_rw(e.operand))
    if isinstance(e, Shift):
        return Shift(e.span, binder=e.binder, binder_ann=e.binder_ann,
                     result_ann=e.result_ann, body=_rw(e.body))
    if isinstance(e, Reset):
        return Reset(e.span, body=_rw(e.body))
    raise TypeError(f"unknown node {type(e)}")

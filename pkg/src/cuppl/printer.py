"""Pretty-printer for programs and expressions.

Output re-parses to a structurally identical tree; shift always prints in its
canonical `shift(k, e)` spelling.
"""

from __future__ import annotations

from .ast import (Apply, BinOp, Bind, Case, Construct, If, Lambda, Literal,
                  Reset, Shift, TApp, TArrow, TDist, TName, TTuple, TVarRef,
                  TVec, UnaryOp, Var, VectorLit)

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4, "*": 5, "/": 5, "%": 5,
}
_UNARY_PREC = 6
_POSTFIX_PREC = 7


def print_type(t):
    if isinstance(t, TName):
        return t.name
    if isinstance(t, TVarRef):
        return f"'{t.name}"
    if isinstance(t, TDist):
        return f"~{print_type(t.elem)}"
    if isinstance(t, TVec):
        return f"[{print_type(t.elem)}]"
    if isinstance(t, TTuple):
        return "(" + ", ".join(print_type(x) for x in t.items) + ")"
    if isinstance(t, TApp):
        if not t.args:
            return t.name
        return "(" + t.name + " " + " ".join(print_type(a) for a in t.args) + ")"
    if isinstance(t, TArrow):
        if len(t.params) == 1:
            lhs = print_type(t.params[0])
            if isinstance(t.params[0], (TArrow, TTuple)):
                lhs = f"({lhs})"
        else:
            lhs = "(" + ", ".join(print_type(p) for p in t.params) + ")"
        out = lhs
        if t.arg_answer is not None:
            out += f" / {print_type(t.arg_answer)}"
        out += f" => {print_type(t.ret)}"
        if t.ret_answer is not None:
            out += f" / {print_type(t.ret_answer)}"
        return out
    raise TypeError(f"unknown type syntax {t!r}")


def _lit(v):
    if v is None:
        return "()"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        r = repr(v)
        return r if ("." in r or "e" in r or "inf" in r or "nan" in r) else r + ".0"
    if isinstance(v, str):
        body = v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
        return f'"{body}"'
    return repr(v)


def print_expr(e, prec=0):
    if isinstance(e, Literal):
        return _lit(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lambda):
        ps = []
        for name, ann in e.params:
            ps.append(name if ann is None else f"{name} : {print_type(ann)}")
        ret = "" if e.ret_ann is None else f" : {print_type(e.ret_ann)}"
        return f"function ({', '.join(ps)}){ret} {{ {print_expr(e.body)} }}"
    if isinstance(e, Apply):
        callee = print_expr(e.callee, _POSTFIX_PREC)
        return f"{callee}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, Construct):
        return f"{e.ctor}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, Bind):
        parts = []
        cur = e
        while isinstance(cur, Bind):
            parts.append(f"{cur.name} <- {print_expr(cur.rhs)};")
            cur = cur.body
        parts.append(print_expr(cur))
        return "{ " + " ".join(parts) + " }"
    if isinstance(e, If):
        return (f"if ({print_expr(e.cond)}) {{ {print_expr(e.then)} }}"
                f" else {{ {print_expr(e.orelse)} }}")
    if isinstance(e, Case):
        arms = []
        for a in e.arms:
            binders = f"({', '.join(a.binders)})" if a.binders else ""
            arms.append(f"{a.ctor}{binders} = {print_expr(a.body, _POSTFIX_PREC)}")
        return f"case ({print_expr(e.scrutinee)}) {{ {' '.join(arms)} }}"
    if isinstance(e, VectorLit):
        return "[" + ", ".join(print_expr(x) for x in e.elements) + "]"
    if isinstance(e, BinOp):
        if e.op == "index":
            return f"{print_expr(e.lhs, _POSTFIX_PREC)}[{print_expr(e.rhs)}]"
        p = _PREC[e.op]
        out = f"{print_expr(e.lhs, p)} {e.op} {print_expr(e.rhs, p + 1)}"
        return f"({out})" if p < prec else out
    if isinstance(e, UnaryOp):
        out = f"{e.op}{print_expr(e.operand, _UNARY_PREC)}"
        return f"({out})" if _UNARY_PREC < prec else out
    if isinstance(e, Shift):
        if e.binder_ann is None and e.result_ann is None:
            return f"shift({e.binder}, {print_expr(e.body)})"
        binder = e.binder
        if e.binder_ann is not None:
            binder += f" : {print_type(e.binder_ann)}"
        ret = "" if e.result_ann is None else f" : {print_type(e.result_ann)}"
        return f"shift ({binder}){ret} {{ {print_expr(e.body)} }}"
    if isinstance(e, Reset):
        return f"reset({print_expr(e.body)})"
    raise TypeError(f"unknown node {type(e)}")


def pretty_print(program):
    """Render a Program as parseable source text."""
    lines = []
    for d in program.type_decls:
        ctors = " ".join(f"({label} : {print_type(payload)})"
                         for label, payload in d.ctors)
        params = "".join(f" '{p}" for p in d.params)
        lines.append(f"type {d.name}{params} : (+ {ctors});")
    for b in program.bindings:
        if b.prelude:
            continue
        lines.append(f"{b.name} <- {print_expr(b.rhs)};")
    lines.append(print_expr(program.result))
    return "\n".join(lines) + "\n"

"""Closure conversion and bytecode emission.

Calling convention (managed stack, one shared flat array of local slots):

  call site      push every in-scope local, push the return-address label,
                 push the callee's environment, push the arguments in order,
                 jump indirectly to the callee's entry
  callee entry   pop arguments in reverse, pop the environment, unpack the
                 captured values into locals
  callee exit    pop the return address, push the result, jump to it
  return block   pop the result, restore the saved locals in reverse

reset pushes its locals and an exit-address label, then records the stack
depth on the reset stack; its exit sequence pops a return address, pushes the
value and jumps, which is the single router through which both the normal
path and every pending continuation return travels.

shift saves everything above the recorded boundary into an immutable segment
and packages it with a resume block; the resume block pops the argument,
restores a copy of the segment, restores the shift-site locals, and continues
at the code that follows the shift.

Top-level bindings live in reserved global slots. They are immutable after
program start and are deliberately excluded from caller saves and captures.
"""

from __future__ import annotations

from . import ast as A
from .builtins import BUILTINS
from .bytecode import (BRANCH, CALL_BUILTIN, HALT, JUMP, JUMP_CLOSURE,
                       JUMP_INDIRECT, MAKE_CLOSURE, MAKE_CONSTRUCTOR,
                       MAKE_CONTINUATION, MAKE_TUPLE, POP, PROJECT,
                       PUSH_CLOSURE_ENV, PUSH_CONST, PUSH_LABEL, PUSH_LOCAL,
                       PUSH_LOCALS, RESET_PEEK, RESET_POP, RESET_PUSH,
                       STACK_RESTORE, STACK_SAVE, STORE_LOCAL,
                       STORE_LOCALS_REV, BytecodeModule)
from .errors import LoweringError

_BINOP_BUILTIN = {
    "+": "__add", "-": "__sub", "*": "__mul", "/": "__div", "%": "__mod",
    "<": "__lt", "<=": "__le", ">": "__gt", ">=": "__ge",
    "==": "__eq", "!=": "__ne",
}


def free_variables(e, exclude=frozenset()):
    """Names free in e, in first-occurrence order.

    `exclude` removes names resolved elsewhere (builtins, top-level bindings),
    matching the closure environment layout.
    """
    seen = []
    seen_set = set()

    def visit(node, bound):
        if isinstance(node, A.Var):
            if node.name not in bound and node.name not in exclude \
                    and node.name not in seen_set:
                seen_set.add(node.name)
                seen.append(node.name)
            return
        if isinstance(node, A.Lambda):
            visit(node.body, bound | {p[0] for p in node.params})
            return
        if isinstance(node, A.Bind):
            visit(node.rhs, bound)
            visit(node.body, bound | {node.name})
            return
        if isinstance(node, A.Case):
            visit(node.scrutinee, bound)
            for arm in node.arms:
                visit(arm.body, bound | set(arm.binders))
            return
        if isinstance(node, A.Shift):
            visit(node.body, bound | {node.binder})
            return
        for c in A.children(node):
            visit(c, bound)

    visit(e, frozenset())
    return seen


class _FnCtx:
    """Lowering context for one function body (or the program entry)."""

    def __init__(self, lowerer, base_slot):
        self.lowerer = lowerer
        self.base = base_slot
        self.next_slot = base_slot
        self.max_slot = base_slot
        self.scope = []          # list of (name, slot), innermost last
        self.active_temps = []   # temp slots live across nested lowering
        self.free_temps = []

    def new_slot(self):
        s = self.next_slot
        self.next_slot += 1
        self.max_slot = max(self.max_slot, self.next_slot)
        return s

    def bind(self, name):
        slot = self.new_slot()
        self.scope.append((name, slot))
        return slot

    def unbind(self, name):
        for i in range(len(self.scope) - 1, -1, -1):
            if self.scope[i][0] == name:
                del self.scope[i]
                return
        raise LoweringError(f"scope underflow for {name}")

    def lookup(self, name):
        for n, s in reversed(self.scope):
            if n == name:
                return s
        return None

    def temp(self):
        if self.free_temps:
            s = self.free_temps.pop()
        else:
            s = self.new_slot()
        self.active_temps.append(s)
        return s

    def release(self, *slots):
        for s in slots:
            self.active_temps.remove(s)
            self.free_temps.append(s)

    def saves(self):
        """The caller-save set: every in-scope local plus live temps."""
        return tuple([s for _, s in self.scope] + list(self.active_temps))


class Lowerer:
    def __init__(self, typed_program):
        self.tp = typed_program
        program = typed_program.program
        self.program = program
        reachable = typed_program.reachable
        if reachable is None:
            raise LoweringError("program must pass the concreteness check first")
        self.module = BytecodeModule(source_file=program.file)
        self.const_ids = {}
        self.label_counter = 0
        self.cur_label = None
        self.cur_instrs = None
        self.eta_wrappers = {}
        # constructor tags, in declaration order
        for d in program.type_decls:
            for label, _ in d.ctors:
                tag = len(self.module.ctor_names)
                self.module.ctor_names.append((label, d.name))
                self.module.ctor_tags[label] = tag
        self.module.builtin_ids = {name: info.id for name, info in BUILTINS.items()}
        # globals: reachable bindings in program order
        self.bindings = [b for b in program.bindings if b.name in reachable]
        for i, b in enumerate(self.bindings):
            self.module.global_names[b.name] = i
        self.module.n_globals = len(self.bindings)
        self._max_fn_slot = 0

    # --- emission plumbing -------------------------------------------------

    def new_label(self, hint):
        self.label_counter += 1
        return f"{hint}${self.label_counter}"

    def start_block(self, label):
        self.cur_label = label
        self.cur_instrs = []
        self.module.blocks.append((label, self.cur_instrs))

    def emit(self, op, a=None, b=None, span=None):
        if span is not None:
            self.module.debug[(self.cur_label, len(self.cur_instrs))] = span
        self.cur_instrs.append((op, a, b))

    def const(self, value):
        key = (type(value).__name__, value)
        if key not in self.const_ids:
            self.const_ids[key] = len(self.module.consts)
            self.module.consts.append(value)
        return self.const_ids[key]

    # --- entry -------------------------------------------------------------

    def lower(self):
        main = _FnCtx(self, self.module.n_globals)
        self.start_block("main")
        for b in self.bindings:
            self.lower_expr(b.rhs, main, hint=b.name)
            self.emit(STORE_LOCAL, self.module.global_names[b.name], span=b.span)
        self.lower_expr(self.program.result, main, hint="result")
        self.emit(HALT, span=self.program.result.span)
        self.start_block(self.module.halt_label)
        self.emit(HALT)
        self.module.n_slots = max(self.module.n_globals, main.max_slot,
                                  self._max_fn_slot)
        self.module.validate()
        return self.module.finalize()

    # --- expressions ---------------------------------------------------------

    def lower_expr(self, e, ctx, hint="e"):
        span = e.span
        if isinstance(e, A.Literal):
            self.emit(PUSH_CONST, self.const(e.value), span=span)
            return
        if isinstance(e, A.Var):
            slot = ctx.lookup(e.name)
            if slot is not None:
                self.emit(PUSH_LOCAL, slot, span=span)
                return
            gslot = self.module.global_names.get(e.name)
            if gslot is not None:
                self.emit(PUSH_LOCAL, gslot, span=span)
                return
            info = BUILTINS.get(e.name)
            if info is not None:
                self.lower_expr(self._eta_wrapper(info, span), ctx, hint=e.name)
                return
            raise LoweringError(f"unresolved name {e.name!r}", span)
        if isinstance(e, A.Lambda):
            self.lower_lambda(e, ctx, hint)
            return
        if isinstance(e, A.Apply):
            self.lower_apply(e, ctx, hint)
            return
        if isinstance(e, A.Bind):
            self.lower_expr(e.rhs, ctx, hint=e.name)
            if e.name == "_":
                self.emit(POP, span=span)
                self.lower_expr(e.body, ctx, hint)
            else:
                slot = ctx.bind(e.name)
                self.emit(STORE_LOCAL, slot, span=span)
                self.lower_expr(e.body, ctx, hint)
                ctx.unbind(e.name)
            return
        if isinstance(e, A.If):
            self.lower_branch(e.cond, e.then, e.orelse, ctx, hint, span)
            return
        if isinstance(e, A.Case):
            self.lower_case(e, ctx, hint)
            return
        if isinstance(e, A.Construct):
            for a in e.args:
                self.lower_expr(a, ctx, hint)
            tag = self.module.ctor_tags.get(e.ctor)
            if tag is None:
                raise LoweringError(f"unknown constructor {e.ctor}", span)
            self.emit(MAKE_CONSTRUCTOR, tag, len(e.args), span=span)
            return
        if isinstance(e, A.VectorLit):
            for x in e.elements:
                self.lower_expr(x, ctx, hint)
            self.emit(CALL_BUILTIN, BUILTINS["__vector"].id, len(e.elements), span=span)
            return
        if isinstance(e, A.BinOp):
            self.lower_binop(e, ctx, hint)
            return
        if isinstance(e, A.UnaryOp):
            self.lower_expr(e.operand, ctx, hint)
            name = "__neg" if e.op == "-" else "__not"
            self.emit(CALL_BUILTIN, BUILTINS[name].id, 1, span=span)
            return
        if isinstance(e, A.Shift):
            self.lower_shift(e, ctx, hint)
            return
        if isinstance(e, A.Reset):
            self.lower_reset(e, ctx, hint)
            return
        raise LoweringError(f"cannot lower {type(e).__name__}", span)

    # --- closures ------------------------------------------------------------

    def lower_lambda(self, e, ctx, hint):
        exclude = (set(BUILTINS) | set(self.module.global_names)) - \
            {n for n, _ in ctx.scope}
        captured = free_variables(e, exclude=exclude)
        for name in captured:
            if ctx.lookup(name) is None:
                raise LoweringError(f"unresolved capture {name!r}", e.span)
        entry = self.new_label(f"{hint}.entry")
        saved_label, saved_instrs = self.cur_label, self.cur_instrs

        fn = _FnCtx(self, self.module.n_globals)
        self.start_block(entry)
        for pname, _ in e.params:
            fn.bind(pname)
        for i in range(len(e.params) - 1, -1, -1):
            self.emit(STORE_LOCAL, fn.lookup(e.params[i][0]), span=e.span)
        t_env = fn.temp()
        self.emit(STORE_LOCAL, t_env, span=e.span)
        for i, name in enumerate(captured):
            slot = fn.bind(name)
            self.emit(PUSH_LOCAL, t_env, span=e.span)
            self.emit(PROJECT, i, span=e.span)
            self.emit(STORE_LOCAL, slot, span=e.span)
        fn.release(t_env)
        self.lower_expr(e.body, fn, hint=hint)
        self._emit_return_seq(fn, e.span)
        self._max_fn_slot = max(self._max_fn_slot, fn.max_slot)

        self.cur_label, self.cur_instrs = saved_label, saved_instrs
        for name in captured:
            self.emit(PUSH_LOCAL, ctx.lookup(name), span=e.span)
        self.emit(MAKE_CLOSURE, entry, len(captured), span=e.span)

    def _emit_return_seq(self, ctx, span):
        # pop return address from under the result, push the result, jump
        t_v = ctx.temp()
        t_l = ctx.temp()
        self.emit(STORE_LOCAL, t_v, span=span)
        self.emit(STORE_LOCAL, t_l, span=span)
        self.emit(PUSH_LOCAL, t_v, span=span)
        self.emit(JUMP_INDIRECT, t_l, span=span)
        ctx.release(t_v, t_l)

    def emit_call(self, ctx, span, emit_callee, emit_args, n_args, hint="call"):
        """The closure-call protocol around caller-supplied emitters."""
        t_f = ctx.temp()
        emit_callee()
        self.emit(STORE_LOCAL, t_f, span=span)
        saves = ctx.saves()
        ret = self.new_label(f"{hint}.ret")
        self.emit(PUSH_LOCALS, saves, span=span)
        self.emit(PUSH_LABEL, ret, span=span)
        self.emit(PUSH_CLOSURE_ENV, t_f, span=span)
        emit_args()
        self.emit(JUMP_CLOSURE, t_f, span=span)
        self.start_block(ret)
        t_res = ctx.temp()
        self.emit(STORE_LOCAL, t_res, span=span)
        self.emit(STORE_LOCALS_REV, saves, span=span)
        self.emit(PUSH_LOCAL, t_res, span=span)
        ctx.release(t_f, t_res)

    def lower_apply(self, e, ctx, hint):
        callee = e.callee
        if isinstance(callee, A.Var) and ctx.lookup(callee.name) is None \
                and callee.name not in self.module.global_names:
            info = BUILTINS.get(callee.name)
            if info is not None:
                if info.kind == "inline":
                    self.lower_vector_op(info.name, e, ctx, hint)
                    return
                if info.arity >= 0 and info.arity != len(e.args):
                    raise LoweringError(
                        f"{callee.name} expects {info.arity} argument(s)", e.span)
                for a in e.args:
                    self.lower_expr(a, ctx, hint)
                self.emit(CALL_BUILTIN, info.id, len(e.args), span=e.span)
                return
        self.emit_call(
            ctx, e.span,
            emit_callee=lambda: self.lower_expr(callee, ctx, hint),
            emit_args=lambda: [self.lower_expr(a, ctx, hint) for a in e.args],
            n_args=len(e.args), hint=hint)

    def _eta_wrapper(self, info, span):
        """First-class use of a builtin: wrap it in a synthetic lambda."""
        if info.arity < 0:
            raise LoweringError(f"{info.name} cannot be used as a value", span)
        key = info.name
        if key not in self.eta_wrappers:
            params = [(f"x{i}", None) for i in range(info.arity)]
            body = A.Apply(span, callee=A.Var(span, name=info.name),
                           args=[A.Var(span, name=p[0]) for p in params])
            self.eta_wrappers[key] = A.Lambda(span, params=params, body=body)
        return self.eta_wrappers[key]

    # --- control flow -----------------------------------------------------

    def lower_branch(self, cond, then_e, else_e, ctx, hint, span):
        self.lower_expr(cond, ctx, hint)
        t_blk = self.new_label(f"{hint}.then")
        e_blk = self.new_label(f"{hint}.else")
        join = self.new_label(f"{hint}.join")
        self.emit(BRANCH, t_blk, e_blk, span=span)
        self.start_block(t_blk)
        self.lower_expr(then_e, ctx, hint)
        self.emit(JUMP, join, span=span)
        self.start_block(e_blk)
        self.lower_expr(else_e, ctx, hint)
        self.emit(JUMP, join, span=span)
        self.start_block(join)

    def lower_case(self, e, ctx, hint):
        span = e.span
        self.lower_expr(e.scrutinee, ctx, hint)
        t_s = ctx.temp()
        self.emit(STORE_LOCAL, t_s, span=span)
        join = self.new_label(f"{hint}.join")
        arm_labels = [self.new_label(f"{hint}.arm{i}") for i in range(len(e.arms))]
        fail = self.new_label(f"{hint}.nomatch")
        for i, arm in enumerate(e.arms):
            tag = self.module.ctor_tags.get(arm.ctor)
            if tag is None:
                raise LoweringError(f"unknown constructor {arm.ctor}", arm.span)
            self.emit(PUSH_LOCAL, t_s, span=arm.span)
            self.emit(PUSH_CONST, self.const(tag), span=arm.span)
            self.emit(CALL_BUILTIN, BUILTINS["__tag-is"].id, 2, span=arm.span)
            test_next = self.new_label(f"{hint}.test") if i + 1 < len(e.arms) else fail
            self.emit(BRANCH, arm_labels[i], test_next, span=arm.span)
            if i + 1 < len(e.arms):
                self.start_block(test_next)
        # nomatch block
        self.start_block(fail)
        self.emit(CALL_BUILTIN, BUILTINS["__match-fail"].id, 0, span=span)
        self.emit(HALT, span=span)
        # arms
        for i, arm in enumerate(e.arms):
            self.start_block(arm_labels[i])
            bound = []
            if len(arm.binders) == 1:
                self.emit(PUSH_LOCAL, t_s, span=arm.span)
                self.emit(CALL_BUILTIN, BUILTINS["__payload"].id, 1, span=arm.span)
                slot = ctx.bind(arm.binders[0])
                bound.append(arm.binders[0])
                self.emit(STORE_LOCAL, slot, span=arm.span)
            elif len(arm.binders) > 1:
                t_p = ctx.temp()
                self.emit(PUSH_LOCAL, t_s, span=arm.span)
                self.emit(CALL_BUILTIN, BUILTINS["__payload"].id, 1, span=arm.span)
                self.emit(STORE_LOCAL, t_p, span=arm.span)
                for j, b in enumerate(arm.binders):
                    slot = ctx.bind(b)
                    bound.append(b)
                    self.emit(PUSH_LOCAL, t_p, span=arm.span)
                    self.emit(PROJECT, j, span=arm.span)
                    self.emit(STORE_LOCAL, slot, span=arm.span)
                ctx.release(t_p)
            self.lower_expr(arm.body, ctx, hint)
            for b in reversed(bound):
                ctx.unbind(b)
            self.emit(JUMP, join, span=arm.span)
        self.start_block(join)
        ctx.release(t_s)

    def lower_binop(self, e, ctx, hint):
        span = e.span
        if e.op == "index":
            kind = self.tp.index_ops.get(e.node_id, ("vector",))
            if kind[0] == "tuple":
                self.lower_expr(e.lhs, ctx, hint)
                self.emit(PROJECT, kind[1], span=span)
            else:
                self.lower_expr(e.lhs, ctx, hint)
                self.lower_expr(e.rhs, ctx, hint)
                self.emit(CALL_BUILTIN, BUILTINS["__vec-index"].id, 2, span=span)
            return
        if e.op == "&&":
            false_lit = A.Literal(span, value=False)
            self.lower_branch(e.lhs, e.rhs, false_lit, ctx, hint, span)
            return
        if e.op == "||":
            true_lit = A.Literal(span, value=True)
            self.lower_branch(e.lhs, true_lit, e.rhs, ctx, hint, span)
            return
        self.lower_expr(e.lhs, ctx, hint)
        self.lower_expr(e.rhs, ctx, hint)
        self.emit(CALL_BUILTIN, BUILTINS[_BINOP_BUILTIN[e.op]].id, 2, span=span)

    # --- delimited control --------------------------------------------------

    def lower_reset(self, e, ctx, hint):
        span = e.span
        saves = ctx.saves()
        exit_blk = self.new_label(f"{hint}.reset_exit")
        self.emit(PUSH_LOCALS, saves, span=span)
        self.emit(PUSH_LABEL, exit_blk, span=span)
        self.emit(RESET_PUSH, span=span)
        self.lower_expr(e.body, ctx, hint)
        self._emit_return_seq(ctx, span)
        self.start_block(exit_blk)
        t_res = ctx.temp()
        self.emit(STORE_LOCAL, t_res, span=span)
        self.emit(RESET_POP, span=span)
        self.emit(STORE_LOCALS_REV, saves, span=span)
        self.emit(PUSH_LOCAL, t_res, span=span)
        ctx.release(t_res)

    def lower_shift(self, e, ctx, hint):
        span = e.span
        saves = ctx.saves()
        resume = self.new_label(f"{hint}.resume")
        self.emit(PUSH_LOCALS, saves, span=span)
        self.emit(RESET_PEEK, span=span)
        self.emit(STACK_SAVE, span=span)
        self.emit(MAKE_CONTINUATION, resume, span=span)
        k_slot = ctx.bind(e.binder)
        self.emit(STORE_LOCAL, k_slot, span=span)
        self.lower_expr(e.body, ctx, hint)
        ctx.unbind(e.binder)
        self._emit_return_seq(ctx, span)
        self.start_block(resume)
        t_arg = ctx.temp()
        self.emit(STORE_LOCAL, t_arg, span=span)
        self.emit(STACK_RESTORE, span=span)
        self.emit(STORE_LOCALS_REV, saves, span=span)
        self.emit(PUSH_LOCAL, t_arg, span=span)
        ctx.release(t_arg)

    # --- inline vector operators ---------------------------------------------

    def _emit_loop(self, ctx, hint, span, setup, cond_slots, body, result):
        """Shared index loop skeleton: setup, while i < n: body, then result."""
        head = self.new_label(f"{hint}.head")
        body_blk = self.new_label(f"{hint}.body")
        done = self.new_label(f"{hint}.done")
        setup()
        self.emit(JUMP, head, span=span)
        self.start_block(head)
        t_i, t_n = cond_slots
        self.emit(PUSH_LOCAL, t_i, span=span)
        self.emit(PUSH_LOCAL, t_n, span=span)
        self.emit(CALL_BUILTIN, BUILTINS["__lt"].id, 2, span=span)
        self.emit(BRANCH, body_blk, done, span=span)
        self.start_block(body_blk)
        body()
        self.emit(PUSH_LOCAL, t_i, span=span)
        self.emit(PUSH_CONST, self.const(1), span=span)
        self.emit(CALL_BUILTIN, BUILTINS["__add"].id, 2, span=span)
        self.emit(STORE_LOCAL, t_i, span=span)
        self.emit(JUMP, head, span=span)
        self.start_block(done)
        result()

    def lower_vector_op(self, name, e, ctx, hint):
        span = e.span
        args = e.args
        expected = BUILTINS[name].arity
        if len(args) != expected:
            raise LoweringError(f"{name} expects {expected} argument(s)", span)
        t_f = ctx.temp()
        self.lower_expr(args[0], ctx, hint)
        self.emit(STORE_LOCAL, t_f, span=span)
        t_i = ctx.temp()
        t_n = ctx.temp()
        t_acc = ctx.temp()
        t_v = None

        def store_zero(slot):
            self.emit(PUSH_CONST, self.const(0), span=span)
            self.emit(STORE_LOCAL, slot, span=span)

        def cons_top_onto_acc():
            self.emit(PUSH_LOCAL, t_acc, span=span)
            self.emit(MAKE_TUPLE, 2, span=span)
            self.emit(STORE_LOCAL, t_acc, span=span)

        def push_elem():
            self.emit(PUSH_LOCAL, t_v, span=span)
            self.emit(PUSH_LOCAL, t_i, span=span)
            self.emit(CALL_BUILTIN, BUILTINS["__vec-index"].id, 2, span=span)

        def finish_rev_list():
            self.emit(PUSH_LOCAL, t_acc, span=span)
            self.emit(CALL_BUILTIN, BUILTINS["__rev-list-vec"].id, 1, span=span)

        if name == "repeat":
            def setup():
                self.lower_expr(args[1], ctx, hint)
                self.emit(STORE_LOCAL, t_n, span=span)
                store_zero(t_i)
                self.emit(PUSH_CONST, self.const(None), span=span)
                self.emit(STORE_LOCAL, t_acc, span=span)

            def body():
                self.emit_call(ctx, span,
                               emit_callee=lambda: self.emit(PUSH_LOCAL, t_f, span=span),
                               emit_args=lambda: self.emit(PUSH_LOCAL, t_i, span=span),
                               n_args=1, hint=hint + ".repeat")
                cons_top_onto_acc()

            self._emit_loop(ctx, hint + ".repeat", span, setup, (t_i, t_n),
                            body, finish_rev_list)
            ctx.release(t_f, t_i, t_n, t_acc)
            return

        t_v = ctx.temp()

        def setup_vec(init_acc_unit=True):
            self.lower_expr(args[-1], ctx, hint)
            self.emit(STORE_LOCAL, t_v, span=span)
            self.emit(PUSH_LOCAL, t_v, span=span)
            self.emit(CALL_BUILTIN, BUILTINS["length"].id, 1, span=span)
            self.emit(STORE_LOCAL, t_n, span=span)
            store_zero(t_i)
            if init_acc_unit:
                self.emit(PUSH_CONST, self.const(None), span=span)
                self.emit(STORE_LOCAL, t_acc, span=span)

        if name == "map":
            def body():
                self.emit_call(ctx, span,
                               emit_callee=lambda: self.emit(PUSH_LOCAL, t_f, span=span),
                               emit_args=push_elem, n_args=1, hint=hint + ".map")
                cons_top_onto_acc()

            self._emit_loop(ctx, hint + ".map", span, setup_vec, (t_i, t_n),
                            body, finish_rev_list)
        elif name == "filter":
            def body():
                keep = self.new_label(f"{hint}.keep")
                skip = self.new_label(f"{hint}.skip")
                self.emit_call(ctx, span,
                               emit_callee=lambda: self.emit(PUSH_LOCAL, t_f, span=span),
                               emit_args=push_elem, n_args=1, hint=hint + ".filter")
                self.emit(BRANCH, keep, skip, span=span)
                self.start_block(keep)
                push_elem()
                cons_top_onto_acc()
                self.emit(JUMP, skip, span=span)
                self.start_block(skip)

            self._emit_loop(ctx, hint + ".filter", span, setup_vec, (t_i, t_n),
                            body, finish_rev_list)
        elif name == "reduce":
            def setup():
                self.lower_expr(args[1], ctx, hint)
                self.emit(STORE_LOCAL, t_acc, span=span)
                setup_vec(init_acc_unit=False)

            def emit_two_args():
                self.emit(PUSH_LOCAL, t_acc, span=span)
                push_elem()

            def body():
                self.emit_call(ctx, span,
                               emit_callee=lambda: self.emit(PUSH_LOCAL, t_f, span=span),
                               emit_args=emit_two_args, n_args=2, hint=hint + ".reduce")
                self.emit(STORE_LOCAL, t_acc, span=span)

            def result():
                self.emit(PUSH_LOCAL, t_acc, span=span)

            self._emit_loop(ctx, hint + ".reduce", span, setup, (t_i, t_n),
                            body, result)
        else:
            raise LoweringError(f"unknown vector operator {name}", span)
        ctx.release(t_f, t_i, t_n, t_acc, t_v)


def lower_program(typed_program):
    """Emit a finalized BytecodeModule for a checked program."""
    return Lowerer(typed_program).lower()

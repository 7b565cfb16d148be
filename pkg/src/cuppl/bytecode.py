"""Bytecode representation: instructions, modules, textual dump.

Blocks are lists of instruction tuples (opcode, a, b). Every block ends in a
control transfer. For execution, blocks are flattened into one code array and
labels become program-counter indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import LoweringError

# opcodes
PUSH_CONST = 0
PUSH_LOCAL = 1
STORE_LOCAL = 2
PUSH_LOCALS = 3        # push each listed slot, in order (protocol save)
STORE_LOCALS_REV = 4   # pop into the listed slots, last slot first (protocol restore)
POP = 5
PUSH_LABEL = 6
PUSH_CLOSURE_ENV = 7   # push env of the callable held in a local slot
MAKE_CLOSURE = 8
MAKE_TUPLE = 9
PROJECT = 10
MAKE_CONSTRUCTOR = 11
JUMP = 12
JUMP_INDIRECT = 13     # target label value read from a local slot
JUMP_CLOSURE = 14      # jump to entry of the callable held in a local slot
BRANCH = 15
RESET_PUSH = 16
RESET_POP = 17
RESET_PEEK = 18
STACK_SAVE = 19        # pop boundary depth; save and pop segment; push it
STACK_RESTORE = 20     # pop a saved segment; push a copy of its slots
MAKE_CONTINUATION = 21
CALL_BUILTIN = 22
HALT = 23

OP_NAMES = {
    PUSH_CONST: "PushConst", PUSH_LOCAL: "PushLocal", STORE_LOCAL: "StoreLocal",
    PUSH_LOCALS: "PushLocals", STORE_LOCALS_REV: "StoreLocalsRev", POP: "Pop",
    PUSH_LABEL: "PushLabel", PUSH_CLOSURE_ENV: "PushClosureEnv",
    MAKE_CLOSURE: "MakeClosure", MAKE_TUPLE: "MakeTuple", PROJECT: "Project",
    MAKE_CONSTRUCTOR: "MakeConstructor", JUMP: "Jump",
    JUMP_INDIRECT: "JumpIndirect", JUMP_CLOSURE: "JumpClosure", BRANCH: "Branch",
    RESET_PUSH: "ResetStackPush", RESET_POP: "ResetStackPop",
    RESET_PEEK: "ResetStackPeek", STACK_SAVE: "StackSaveToBoundary",
    STACK_RESTORE: "StackRestore", MAKE_CONTINUATION: "MakeContinuation",
    CALL_BUILTIN: "CallBuiltin", HALT: "Halt",
}

_TERMINATORS = frozenset({JUMP, JUMP_INDIRECT, JUMP_CLOSURE, BRANCH, HALT})

_LABEL_OPERANDS = {
    PUSH_LABEL: (0,), MAKE_CLOSURE: (0,), JUMP: (0,), BRANCH: (0, 1),
    MAKE_CONTINUATION: (0,),
}


def stack_effect(instr):
    """(pops, pushes) for an instruction; None marks a dynamic count."""
    op, a, b = instr
    if op == PUSH_CONST or op == PUSH_LOCAL or op == PUSH_LABEL \
            or op == PUSH_CLOSURE_ENV or op == RESET_PEEK:
        return (0, 1)
    if op == STORE_LOCAL or op == POP or op == BRANCH:
        return (1, 0)
    if op == PUSH_LOCALS:
        return (0, len(a))
    if op == STORE_LOCALS_REV:
        return (len(a), 0)
    if op == MAKE_CLOSURE:
        return (b, 1)
    if op == MAKE_TUPLE or op == MAKE_CONSTRUCTOR:
        return (b if op == MAKE_CONSTRUCTOR else a, 1)
    if op == PROJECT:
        return (1, 1)
    if op == CALL_BUILTIN:
        return (b, 1)
    if op == STACK_SAVE:
        return (1, None)   # truncates to the popped boundary, then pushes one
    if op == STACK_RESTORE:
        return (1, None)   # pushes the segment's slots
    if op == MAKE_CONTINUATION:
        return (1, 1)
    return (0, 0)


@dataclass
class BytecodeModule:
    blocks: list = field(default_factory=list)      # of (label, [instr])
    entry: str = "main"
    consts: list = field(default_factory=list)
    n_globals: int = 0
    n_slots: int = 0
    global_names: dict = field(default_factory=dict)   # name -> global slot
    ctor_names: list = field(default_factory=list)     # tag -> (label, decl)
    ctor_tags: dict = field(default_factory=dict)      # label -> tag
    builtin_ids: dict = field(default_factory=dict)    # name -> id
    debug: dict = field(default_factory=dict)          # (label, i) -> SourceSpan
    source_file: str = "<input>"
    # execution form, built by finalize()
    code: list = field(default_factory=list, repr=False)
    label_pc: dict = field(default_factory=dict, repr=False)
    pc_debug: dict = field(default_factory=dict, repr=False)
    halt_label: str = "__halt__"

    def finalize(self):
        self.code = []
        self.label_pc = {}
        self.pc_debug = {}
        for label, instrs in self.blocks:
            self.label_pc[label] = len(self.code)
            for i, ins in enumerate(instrs):
                sp = self.debug.get((label, i))
                if sp is not None:
                    self.pc_debug[len(self.code)] = sp
                self.code.append(ins)
        # rewrite label operands into pcs
        resolved = []
        for ins in self.code:
            op, a, b = ins
            slots = _LABEL_OPERANDS.get(op)
            if slots:
                vals = [a, b]
                for s in slots:
                    vals[s] = self.label_pc[vals[s]]
                ins = (op, vals[0], vals[1])
            resolved.append(ins)
        self.code = resolved
        return self

    def validate(self):
        labels = {label for label, _ in self.blocks}
        if len(labels) != len(self.blocks):
            raise LoweringError("duplicate block label")
        if self.entry not in labels:
            raise LoweringError("entry label missing")
        for label, instrs in self.blocks:
            if not instrs:
                raise LoweringError(f"empty block {label}")
            if instrs[-1][0] not in _TERMINATORS:
                raise LoweringError(f"block {label} does not end in a control transfer")
            for ins in instrs:
                op, a, b = ins
                for s in _LABEL_OPERANDS.get(op, ()):
                    target = (a, b)[s]
                    if target not in labels:
                        raise LoweringError(f"unresolved label {target!r} in {label}")
                if op == PUSH_CONST and not (0 <= a < len(self.consts)):
                    raise LoweringError(f"constant index {a} out of range")
        return self


def render_operand(module, op, idx, val):
    if val is None:
        return None
    if op in _LABEL_OPERANDS and idx in _LABEL_OPERANDS[op]:
        return str(val)
    if op == PUSH_CONST and idx == 0:
        return f"{val} ({module.consts[val]!r})"
    if op == CALL_BUILTIN and idx == 0:
        names = {v: k for k, v in module.builtin_ids.items()}
        return names.get(val, str(val))
    if op in (PUSH_LOCALS, STORE_LOCALS_REV) and idx == 0:
        return "[" + ",".join(map(str, val)) + "]"
    return str(val)


def dump(module):
    """Stable text form: one instruction per line, `LABEL: OPCODE operands`."""
    lines = []
    for label, instrs in module.blocks:
        for ins in instrs:
            op, a, b = ins
            parts = [OP_NAMES[op]]
            for idx, v in enumerate((a, b)):
                r = render_operand(module, op, idx, v)
                if r is not None:
                    parts.append(r)
            lines.append(f"{label}: " + " ".join(parts))
    return "\n".join(lines) + "\n"

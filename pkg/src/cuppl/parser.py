"""Recursive-descent parser producing Program trees.

Top level is a sequence of type declarations, then `name <- expr;` bindings
(`=` is accepted as the same binding form), then one final result expression.
Blocks nest statements into Bind chains directly; expression statements bind
the throwaway name `_`.
"""

from __future__ import annotations

from .ast import (Apply, BinOp, Bind, Binding, Case, CaseArm, Construct, Expr,
                  If, Lambda, Literal, Program, Reset, Shift, SourceSpan,
                  TApp, TArrow, TDist, TName, TSum, TTuple, TVarRef, TVec,
                  TypeDecl, UnaryOp, Var, VectorLit)
from .errors import ParseError
from .lexer import tokenize

_BASE_TYPES = frozenset({"int", "real", "bool", "unit", "string"})

_CMP_OPS = {"EQEQ": "==", "NEQ": "!=", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}
_ADD_OPS = {"PLUS": "+", "MINUS": "-"}
_MUL_OPS = {"STAR": "*", "SLASH": "/", "PERCENT": "%"}


def _is_ctor_name(name):
    return name[:1].isupper()


class _Parser:
    def __init__(self, tokens, file):
        self.tokens = tokens
        self.file = file
        self.pos = 0

    # --- token plumbing ---------------------------------------------------

    def peek(self, ahead=0):
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, *kinds):
        t = self.peek()
        return t is not None and t.kind in kinds

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self._eof_span())
        self.pos += 1
        return t

    def expect(self, kind, what=None):
        t = self.peek()
        if t is None or t.kind != kind:
            got = t.kind if t else "end of input"
            raise ParseError(f"expected {what or kind}, found {got}",
                             t.span if t else self._eof_span(), expected={kind})
        self.pos += 1
        return t

    def _eof_span(self):
        if self.tokens:
            return self.tokens[-1].span
        return SourceSpan(self.file, 1, 1, 1, 1)

    # --- program ----------------------------------------------------------

    def parse_program(self):
        decls = []
        while self.at("TYPE"):
            decls.append(self.parse_type_decl())
        bindings = []
        result = None
        while self.peek() is not None:
            if self.at("TYPE"):
                raise ParseError("type declarations must precede all bindings",
                                 self.peek().span)
            if (self.at("IDENT") and self.peek(1) is not None
                    and self.peek(1).kind in ("ARROW", "EQUALS")):
                name_tok = self.next()
                self.next()  # <- or =
                rhs = self.parse_expr()
                semi = self.expect("SEMI", "';' after binding")
                bindings.append(Binding(name_tok.value, rhs,
                                        name_tok.span.merge(semi.span)))
                continue
            result = self.parse_expr()
            if self.peek() is not None:
                raise ParseError("expected end of input after the final expression",
                                 self.peek().span)
            break
        if result is None:
            raise ParseError("program must end with a result expression",
                             self._eof_span())
        names = [b.name for b in bindings]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ParseError(f"duplicate top-level binding: {sorted(dup)[0]}",
                             bindings[-1].span)
        return Program(decls, bindings, result, file=self.file)

    def parse_type_decl(self):
        start = self.expect("TYPE")
        name = self.expect("IDENT", "type name")
        if not _is_ctor_name(name.value):
            raise ParseError("type names start with an uppercase letter", name.span)
        params = []
        while self.at("TYVAR"):
            params.append(self.next().value)
        self.expect("COLON")
        self.expect("LPAREN")
        self.expect("PLUS", "'+' opening a sum type")
        ctors = []
        while self.at("LPAREN"):
            self.next()
            label = self.expect("IDENT", "constructor label")
            if not _is_ctor_name(label.value):
                raise ParseError("constructor labels start uppercase", label.span)
            self.expect("COLON")
            payload = self.parse_type()
            self.expect("RPAREN")
            ctors.append((label.value, payload))
        close = self.expect("RPAREN")
        semi = self.expect("SEMI")
        if not ctors:
            raise ParseError("sum type needs at least one constructor", close.span)
        labels = [c[0] for c in ctors]
        if len(set(labels)) != len(labels):
            raise ParseError("duplicate constructor label", close.span)
        return TypeDecl(name.value, params, ctors, start.span.merge(semi.span))

    # --- types ------------------------------------------------------------

    def parse_type(self):
        lhs, was_paren_list = self.parse_type_atom()
        arg_answer = None
        if self.at("SLASH"):
            self.next()
            arg_answer, _ = self.parse_type_atom()
        if self.at("FATARROW"):
            self.next()
            ret, _ = self.parse_type_atom()
            ret_answer = None
            if self.at("SLASH"):
                self.next()
                ret_answer, _ = self.parse_type_atom()
            params = tuple(lhs.items) if (was_paren_list and isinstance(lhs, TTuple)) else (lhs,)
            return TArrow(params, ret, arg_answer, ret_answer)
        if arg_answer is not None:
            raise ParseError("'/' answer annotation requires '=>'",
                             self.peek().span if self.peek() else self._eof_span())
        return lhs

    def parse_type_atom(self):
        """Returns (type, came_from_parenthesized_comma_list)."""
        t = self.peek()
        if t is None:
            raise ParseError("expected a type", self._eof_span())
        if t.kind == "TILDE":
            self.next()
            inner, _ = self.parse_type_atom()
            return TDist(inner), False
        if t.kind == "LBRACKET":
            self.next()
            inner = self.parse_type()
            self.expect("RBRACKET")
            return TVec(inner), False
        if t.kind == "TYVAR":
            self.next()
            return TVarRef(t.value), False
        if t.kind == "IDENT":
            self.next()
            if t.value in _BASE_TYPES:
                return TName(t.value), False
            if _is_ctor_name(t.value):
                return TApp(t.value, ()), False
            return TVarRef(t.value), False
        if t.kind == "LPAREN":
            self.next()
            if self.at("RPAREN"):
                self.next()
                return TName("unit"), False
            first = self.parse_type()
            if self.at("COMMA"):
                items = [first]
                while self.at("COMMA"):
                    self.next()
                    items.append(self.parse_type())
                self.expect("RPAREN")
                return TTuple(tuple(items)), True
            if isinstance(first, TApp) and not first.args and not self.at("RPAREN"):
                args = []
                while not self.at("RPAREN"):
                    arg, _ = self.parse_type_atom()
                    args.append(arg)
                self.expect("RPAREN")
                return TApp(first.name, tuple(args)), False
            self.expect("RPAREN")
            return first, False
        raise ParseError(f"expected a type, found {t.kind}", t.span)

    # --- expressions --------------------------------------------------------

    def parse_expr(self):
        return self.parse_or()

    def _binop_chain(self, sub, ops):
        e = sub()
        while self.peek() is not None and self.peek().kind in ops:
            op_tok = self.next()
            rhs = sub()
            e = BinOp(e.span.merge(rhs.span), op=ops[op_tok.kind], lhs=e, rhs=rhs)
        return e

    def parse_or(self):
        return self._binop_chain(self.parse_and, {"OROR": "||"})

    def parse_and(self):
        return self._binop_chain(self.parse_cmp, {"ANDAND": "&&"})

    def parse_cmp(self):
        e = self.parse_add()
        if self.peek() is not None and self.peek().kind in _CMP_OPS:
            op_tok = self.next()
            rhs = self.parse_add()
            return BinOp(e.span.merge(rhs.span), op=_CMP_OPS[op_tok.kind],
                         lhs=e, rhs=rhs)
        return e

    def parse_add(self):
        return self._binop_chain(self.parse_mul, _ADD_OPS)

    def parse_mul(self):
        return self._binop_chain(self.parse_unary, _MUL_OPS)

    def parse_unary(self):
        t = self.peek()
        if t is not None and t.kind in ("MINUS", "BANG"):
            self.next()
            operand = self.parse_unary()
            return UnaryOp(t.span.merge(operand.span),
                           op="-" if t.kind == "MINUS" else "!", operand=operand)
        return self.parse_postfix()

    def parse_postfix(self):
        e = self.parse_primary()
        while True:
            if self.at("LPAREN"):
                self.next()
                args = []
                if not self.at("RPAREN"):
                    args.append(self.parse_expr())
                    while self.at("COMMA"):
                        self.next()
                        args.append(self.parse_expr())
                close = self.expect("RPAREN")
                span = e.span.merge(close.span)
                if isinstance(e, Var) and _is_ctor_name(e.name):
                    e = Construct(span, ctor=e.name, args=args)
                else:
                    e = Apply(span, callee=e, args=args)
            elif self.at("LBRACKET"):
                self.next()
                idx = self.parse_expr()
                close = self.expect("RBRACKET")
                e = BinOp(e.span.merge(close.span), op="index", lhs=e, rhs=idx)
            else:
                return e

    def parse_primary(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self._eof_span())
        if t.kind == "INT" or t.kind == "REAL" or t.kind == "STRING":
            self.next()
            return Literal(t.span, value=t.value)
        if t.kind == "TRUE" or t.kind == "FALSE":
            self.next()
            return Literal(t.span, value=(t.kind == "TRUE"))
        if t.kind == "IDENT":
            self.next()
            if _is_ctor_name(t.value) and not self.at("LPAREN"):
                raise ParseError(f"constructor {t.value} must be applied", t.span)
            return Var(t.span, name=t.value)
        if t.kind == "LPAREN":
            self.next()
            if self.at("RPAREN"):
                close = self.next()
                return Literal(t.span.merge(close.span), value=None)
            inner = self.parse_expr()
            self.expect("RPAREN")
            return inner
        if t.kind == "LBRACKET":
            self.next()
            elems = []
            if not self.at("RBRACKET"):
                elems.append(self.parse_expr())
                while self.at("COMMA"):
                    self.next()
                    elems.append(self.parse_expr())
            close = self.expect("RBRACKET")
            return VectorLit(t.span.merge(close.span), elements=elems)
        if t.kind == "LBRACE":
            return self.parse_block()
        if t.kind == "IF":
            return self.parse_if()
        if t.kind == "CASE":
            return self.parse_case()
        if t.kind == "SHIFT":
            return self.parse_shift()
        if t.kind == "RESET":
            self.next()
            if self.at("LPAREN"):
                self.next()
                body = self.parse_expr()
                close = self.expect("RPAREN")
            else:
                body = self.parse_block()
                close = self.tokens[self.pos - 1]
            return Reset(t.span.merge(close.span), body=body)
        if t.kind == "FUNCTION":
            return self.parse_function()
        raise ParseError(f"unexpected token {t.lexeme!r}", t.span)

    def parse_block(self):
        open_ = self.expect("LBRACE")
        stmts = []  # (name or "_", expr, stmt_span)
        while True:
            if self.at("RBRACE"):
                raise ParseError("block must end with an expression", self.peek().span)
            if (self.at("IDENT") and self.peek(1) is not None
                    and self.peek(1).kind in ("ARROW", "EQUALS")):
                name_tok = self.next()
                self.next()
                rhs = self.parse_expr()
                semi = self.expect("SEMI", "';' after binding")
                stmts.append((name_tok.value, rhs, name_tok.span.merge(semi.span)))
                continue
            e = self.parse_expr()
            if self.at("SEMI"):
                semi = self.next()
                stmts.append(("_", e, e.span.merge(semi.span)))
                continue
            close = self.expect("RBRACE", "'}' closing the block")
            result = e
            break
        for name, rhs, sp in reversed(stmts):
            result = Bind(sp.merge(result.span), name=name, rhs=rhs, body=result)
        return result

    def parse_if(self):
        start = self.expect("IF")
        self.expect("LPAREN")
        cond = self.parse_expr()
        self.expect("RPAREN")
        then = self.parse_block()
        self.expect("ELSE")
        if self.at("IF"):
            orelse = self.parse_if()
        else:
            orelse = self.parse_block()
        return If(start.span.merge(orelse.span), cond=cond, then=then, orelse=orelse)

    def parse_case(self):
        start = self.expect("CASE")
        self.expect("LPAREN")
        scrut = self.parse_expr()
        self.expect("RPAREN")
        self.expect("LBRACE")
        arms = []
        while self.at("IDENT") and _is_ctor_name(self.peek().value):
            ctor_tok = self.next()
            binders = []
            if self.at("LPAREN"):
                self.next()
                binders.append(self.expect("IDENT", "pattern binder").value)
                while self.at("COMMA"):
                    self.next()
                    binders.append(self.expect("IDENT", "pattern binder").value)
                self.expect("RPAREN")
            self.expect("EQUALS", "'=' in case arm")
            body = self.parse_expr()
            arms.append(CaseArm(ctor_tok.value, binders, body,
                                ctor_tok.span.merge(body.span)))
        close = self.expect("RBRACE", "'}' closing case")
        if not arms:
            raise ParseError("case needs at least one arm", close.span)
        return Case(start.span.merge(close.span), scrutinee=scrut, arms=arms)

    def parse_shift(self):
        start = self.expect("SHIFT")
        binder_ann = None
        result_ann = None
        if self.at("IDENT"):
            binder = self.next()
            self._check_binder(binder)
            body = self.parse_block()
            return Shift(start.span.merge(body.span), binder=binder.value, body=body)
        self.expect("LPAREN")
        binder = self.expect("IDENT", "continuation name")
        self._check_binder(binder)
        if self.at("COMMA"):
            self.next()
            body = self.parse_expr()
            close = self.expect("RPAREN")
            return Shift(start.span.merge(close.span), binder=binder.value, body=body)
        if self.at("COLON"):
            self.next()
            binder_ann = self.parse_type()
        self.expect("RPAREN")
        if self.at("COLON"):
            self.next()
            result_ann = self.parse_type()
        body = self.parse_block()
        return Shift(start.span.merge(body.span), binder=binder.value,
                     binder_ann=binder_ann, result_ann=result_ann, body=body)

    def _check_binder(self, tok):
        if _is_ctor_name(tok.value):
            raise ParseError("continuation names are lowercase", tok.span)

    def parse_function(self):
        start = self.expect("FUNCTION")
        self.expect("LPAREN")
        params = []
        if not self.at("RPAREN"):
            params.append(self._parse_param())
            while self.at("COMMA"):
                self.next()
                params.append(self._parse_param())
        self.expect("RPAREN")
        ret_ann = None
        if self.at("COLON"):
            self.next()
            ret_ann = self.parse_type()
        body = self.parse_block()
        return Lambda(start.span.merge(body.span), params=params,
                      ret_ann=ret_ann, body=body)

    def _parse_param(self):
        name = self.expect("IDENT", "parameter name")
        ann = None
        if self.at("COLON"):
            self.next()
            ann = self.parse_type()
        return (name.value, ann)


def parse(source, file="<input>"):
    """Parse source text into a Program."""
    return _Parser(tokenize(source, file), file).parse_program()


def parse_expr(source, file="<input>"):
    """Parse a single expression (test helper)."""
    p = _Parser(tokenize(source, file), file)
    e = p.parse_expr()
    if p.peek() is not None:
        raise ParseError("trailing input after expression", p.peek().span)
    return e

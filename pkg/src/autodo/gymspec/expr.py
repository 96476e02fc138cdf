"""Arithmetic/boolean expression language used throughout gym specifications.

Transition assignments, reward metrics, and termination criteria are all
written in this small pure DSL. The grammar (documented in
docs/gymspec-grammar.md) supports, from lowest to highest precedence:

    or > and > not > comparisons > + - > * / > unary - > primary

Primaries are numeric literals, ``true``/``false``, identifiers, calls to
``min``/``max``/``abs``/``if``, and parenthesized expressions. Expressions
type-check to either NUMBER or BOOLEAN; identifiers are always numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DivisionByZero, ExpressionTypeError, ParseError

NUMBER = "number"
BOOLEAN = "boolean"

_COMPARISONS = ("==", "!=", "<=", ">=", "<", ">")
_KEYWORDS = {"and", "or", "not", "true", "false"}
_FUNCTIONS = {"min", "max", "abs", "if"}


# --- AST ---------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: float | bool
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Name:
    ident: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "not"
    operand: Expr
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str  # "min", "max", "abs"
    args: tuple[Expr, ...]
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Expr
    orelse: Expr
    pos: int = field(default=0, compare=False)


Expr = Literal | Name | Unary | Binary | Call | If


# --- Lexer -------------------------------------------------------------


@dataclass
class _Token:
    kind: str  # "num", "ident", "op", "lparen", "rparen", "comma", "eof"
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                if source[j] == ".":
                    seen_dot = True
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    while k < n and source[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("num", source[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("ident", source[i:j], i))
            i = j
            continue
        two = source[i : i + 2]
        if two in ("==", "!=", "<=", ">="):
            tokens.append(_Token("op", two, i))
            i += 2
            continue
        if c in "+-*/<>":
            tokens.append(_Token("op", c, i))
            i += 1
            continue
        if c == "(":
            tokens.append(_Token("lparen", c, i))
            i += 1
            continue
        if c == ")":
            tokens.append(_Token("rparen", c, i))
            i += 1
            continue
        if c == ",":
            tokens.append(_Token("comma", c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(_Token("eof", "", n))
    return tokens


# --- Parser ------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.cur
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def parse(self) -> Expr:
        expr = self.or_expr()
        if self.cur.kind != "eof":
            raise ParseError(f"unexpected trailing input {self.cur.text!r}", self.cur.pos)
        return expr

    def or_expr(self) -> Expr:
        left = self.and_expr()
        while self.cur.kind == "ident" and self.cur.text == "or":
            pos = self.advance().pos
            left = Binary("or", left, self.and_expr(), pos)
        return left

    def and_expr(self) -> Expr:
        left = self.not_expr()
        while self.cur.kind == "ident" and self.cur.text == "and":
            pos = self.advance().pos
            left = Binary("and", left, self.not_expr(), pos)
        return left

    def not_expr(self) -> Expr:
        if self.cur.kind == "ident" and self.cur.text == "not":
            pos = self.advance().pos
            return Unary("not", self.not_expr(), pos)
        return self.comparison()

    def comparison(self) -> Expr:
        left = self.additive()
        if self.cur.kind == "op" and self.cur.text in _COMPARISONS:
            tok = self.advance()
            return Binary(tok.text, left, self.additive(), tok.pos)
        return left

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.cur.kind == "op" and self.cur.text in ("+", "-"):
            tok = self.advance()
            left = Binary(tok.text, left, self.multiplicative(), tok.pos)
        return left

    def multiplicative(self) -> Expr:
        left = self.unary()
        while self.cur.kind == "op" and self.cur.text in ("*", "/"):
            tok = self.advance()
            left = Binary(tok.text, left, self.unary(), tok.pos)
        return left

    def unary(self) -> Expr:
        if self.cur.kind == "op" and self.cur.text == "-":
            pos = self.advance().pos
            return Unary("-", self.unary(), pos)
        return self.primary()

    def primary(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            text = tok.text
            value = float(text)
            return Literal(value, tok.pos)
        if tok.kind == "lparen":
            self.advance()
            inner = self.or_expr()
            self.expect("rparen")
            return inner
        if tok.kind == "ident":
            self.advance()
            if tok.text == "true":
                return Literal(True, tok.pos)
            if tok.text == "false":
                return Literal(False, tok.pos)
            if tok.text in ("and", "or", "not"):
                raise ParseError(f"misplaced keyword {tok.text!r}", tok.pos)
            if self.cur.kind == "lparen":
                if tok.text not in _FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}", tok.pos)
                self.advance()
                args: list[Expr] = []
                if self.cur.kind != "rparen":
                    args.append(self.or_expr())
                    while self.cur.kind == "comma":
                        self.advance()
                        args.append(self.or_expr())
                self.expect("rparen")
                return self._make_call(tok, args)
            return Name(tok.text, tok.pos)
        raise ParseError(f"expected expression, found {tok.text or 'end of input'!r}", tok.pos)

    def _make_call(self, tok: _Token, args: list[Expr]) -> Expr:
        if tok.text == "if":
            if len(args) != 3:
                raise ParseError("if() takes exactly 3 arguments", tok.pos)
            return If(args[0], args[1], args[2], tok.pos)
        if tok.text == "abs":
            if len(args) != 1:
                raise ParseError("abs() takes exactly 1 argument", tok.pos)
        elif len(args) < 2:
            raise ParseError(f"{tok.text}() takes at least 2 arguments", tok.pos)
        return Call(tok.text, tuple(args), tok.pos)


def parse_expression(source: str) -> Expr:
    """Parse DSL source text into an expression tree."""
    return _Parser(_tokenize(source)).parse()


# --- Type checking -----------------------------------------------------


def infer_type(expr: Expr, known_names: set[str]) -> str:
    """Return NUMBER or BOOLEAN; raise on type errors or unknown identifiers.

    All identifiers are numeric (state variables, ``step``, action parameters).
    """
    if isinstance(expr, Literal):
        return BOOLEAN if isinstance(expr.value, bool) else NUMBER
    if isinstance(expr, Name):
        if expr.ident not in known_names:
            raise ExpressionTypeError(f"unknown identifier '{expr.ident}'")
        return NUMBER
    if isinstance(expr, Unary):
        inner = infer_type(expr.operand, known_names)
        want = BOOLEAN if expr.op == "not" else NUMBER
        if inner != want:
            raise ExpressionTypeError(f"operator '{expr.op}' requires a {want} operand")
        return want
    if isinstance(expr, Binary):
        left = infer_type(expr.left, known_names)
        right = infer_type(expr.right, known_names)
        if expr.op in ("and", "or"):
            if left != BOOLEAN or right != BOOLEAN:
                raise ExpressionTypeError(f"operator '{expr.op}' requires boolean operands")
            return BOOLEAN
        if expr.op in _COMPARISONS:
            if left != NUMBER or right != NUMBER:
                raise ExpressionTypeError(f"comparison '{expr.op}' requires numeric operands")
            return BOOLEAN
        if left != NUMBER or right != NUMBER:
            raise ExpressionTypeError(f"operator '{expr.op}' requires numeric operands")
        return NUMBER
    if isinstance(expr, Call):
        for arg in expr.args:
            if infer_type(arg, known_names) != NUMBER:
                raise ExpressionTypeError(f"{expr.func}() requires numeric arguments")
        return NUMBER
    if isinstance(expr, If):
        if infer_type(expr.cond, known_names) != BOOLEAN:
            raise ExpressionTypeError("if() condition must be boolean")
        then = infer_type(expr.then, known_names)
        orelse = infer_type(expr.orelse, known_names)
        if then != orelse:
            raise ExpressionTypeError("if() branches must have the same type")
        return then
    raise TypeError(f"not an expression node: {expr!r}")


def free_names(expr: Expr) -> set[str]:
    """Identifiers referenced anywhere in the expression."""
    if isinstance(expr, Literal):
        return set()
    if isinstance(expr, Name):
        return {expr.ident}
    if isinstance(expr, Unary):
        return free_names(expr.operand)
    if isinstance(expr, Binary):
        return free_names(expr.left) | free_names(expr.right)
    if isinstance(expr, Call):
        out: set[str] = set()
        for arg in expr.args:
            out |= free_names(arg)
        return out
    if isinstance(expr, If):
        return free_names(expr.cond) | free_names(expr.then) | free_names(expr.orelse)
    raise TypeError(f"not an expression node: {expr!r}")


# --- Evaluation --------------------------------------------------------


def evaluate(expr: Expr, env: dict[str, float]) -> float | bool:
    """Evaluate against an identifier environment.

    Raises DivisionByZero on a zero divisor; the caller decides episode fate.
    """
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Name):
        return env[expr.ident]
    if isinstance(expr, Unary):
        value = evaluate(expr.operand, env)
        return (not value) if expr.op == "not" else -value
    if isinstance(expr, Binary):
        op = expr.op
        if op == "and":
            return bool(evaluate(expr.left, env)) and bool(evaluate(expr.right, env))
        if op == "or":
            return bool(evaluate(expr.left, env)) or bool(evaluate(expr.right, env))
        left = evaluate(expr.left, env)
        right = evaluate(expr.right, env)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                raise DivisionByZero(f"division by zero (at position {expr.pos})")
            return left / right
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        raise TypeError(f"unknown operator {op!r}")
    if isinstance(expr, Call):
        args = [evaluate(a, env) for a in expr.args]
        if expr.func == "min":
            return min(args)
        if expr.func == "max":
            return max(args)
        if expr.func == "abs":
            return abs(args[0])
        raise TypeError(f"unknown function {expr.func!r}")
    if isinstance(expr, If):
        branch = expr.then if evaluate(expr.cond, env) else expr.orelse
        return evaluate(branch, env)
    raise TypeError(f"not an expression node: {expr!r}")


# --- Rendering ---------------------------------------------------------

_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
_UNARY_PRECEDENCE = {"not": 3, "-": 7}
_ATOM_PRECEDENCE = 8


def format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def unparse(expr: Expr) -> str:
    """Render back to DSL text; parse(unparse(e)) equals e."""
    text, _ = _unparse(expr)
    return text


def _unparse(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, Literal):
        if isinstance(expr.value, bool):
            return ("true" if expr.value else "false", _ATOM_PRECEDENCE)
        return (format_number(expr.value), _ATOM_PRECEDENCE)
    if isinstance(expr, Name):
        return (expr.ident, _ATOM_PRECEDENCE)
    if isinstance(expr, Unary):
        prec = _UNARY_PRECEDENCE[expr.op]
        inner, inner_prec = _unparse(expr.operand)
        if inner_prec < prec:
            inner = f"({inner})"
        joiner = "not " if expr.op == "not" else "-"
        return (f"{joiner}{inner}", prec)
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        left, left_prec = _unparse(expr.left)
        right, right_prec = _unparse(expr.right)
        # left-associative: the right operand needs parens at equal precedence;
        # comparisons don't chain, so both sides do
        if left_prec < prec or (left_prec == prec and expr.op in _COMPARISONS):
            left = f"({left})"
        if right_prec <= prec:
            right = f"({right})"
        return (f"{left} {expr.op} {right}", prec)
    if isinstance(expr, Call):
        args = ", ".join(unparse(a) for a in expr.args)
        return (f"{expr.func}({args})", _ATOM_PRECEDENCE)
    if isinstance(expr, If):
        parts = ", ".join(unparse(a) for a in (expr.cond, expr.then, expr.orelse))
        return (f"if({parts})", _ATOM_PRECEDENCE)
    raise TypeError(f"not an expression node: {expr!r}")

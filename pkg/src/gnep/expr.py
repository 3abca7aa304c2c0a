"""Arithmetic expressions for payoffs and constraint inequalities.

Grammar (whitespace-insensitive)::

    expr   = term { ("+" | "-") term }
    term   = factor { ("*" | "/") factor }
    factor = [ "-" ] atom
    atom   = number | var | func "(" expr { "," expr } ")" | "(" expr ")"
    var    = "x" "[" int "]" "[" int "]" | "y" "[" int "]"

``x[i][k]`` is coordinate ``k`` of player ``i``'s component of the global
decision (players are 1-based, coordinates 0-based); ``y[k]`` is coordinate
``k`` of the owning player's deviation.

Evaluation works on Python floats or on numpy arrays (one candidate per
element), so the same tree drives scalar checks and batched searches.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Num", "XVar", "YVar", "Neg", "BinOp", "Call", "Expression",
    "Binding", "ExpressionSyntaxError", "EvaluationError", "DomainError",
    "UnboundVariableError", "parse", "evaluate", "free_variables",
    "to_text", "FUNCTIONS",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class XVar:
    player: int
    coord: int


@dataclass(frozen=True)
class YVar:
    coord: int


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expression = Union[Num, XVar, YVar, Neg, BinOp, Call]

FUNCTIONS = {"min": 2, "max": 2, "pow": 2, "abs": 1, "exp": 1, "log": 1, "sqrt": 1}


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class EvaluationError(ArithmeticError):
    pass


class DomainError(EvaluationError):
    pass


class UnboundVariableError(EvaluationError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unbound variable"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),\[\]])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    end = len(text)
    while pos < end:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        where = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExpressionSyntaxError(f"{message} (found {where})", tok[2], self.text)

    def expect(self, value):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != value:
            self.fail(f"expected {value!r}")
        return self.take()

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.atom())
        return self.atom()

    def integer(self):
        tok = self.peek()
        if tok[0] != "num" or not tok[1].isdigit():
            self.fail("expected integer index")
        self.take()
        return int(tok[1])

    def atom(self):
        tok = self.peek()
        kind, value, pos = tok
        if kind == "num":
            self.take()
            number = float(value)
            if not math.isfinite(number):
                raise ExpressionSyntaxError("numeric literal out of range", pos, self.text)
            return Num(number)
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            self.take()
            if value == "x":
                self.expect("[")
                player = self.integer()
                self.expect("]")
                self.expect("[")
                coord = self.integer()
                self.expect("]")
                if player < 1:
                    raise ExpressionSyntaxError("player index must be >= 1", pos, self.text)
                return XVar(player, coord)
            if value == "y":
                self.expect("[")
                coord = self.integer()
                self.expect("]")
                return YVar(coord)
            if value in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[value]:
                    raise ExpressionSyntaxError(
                        f"{value} takes {FUNCTIONS[value]} argument(s), got {len(args)}",
                        pos, self.text)
                return Call(value, tuple(args))
            raise ExpressionSyntaxError(f"unknown identifier {value!r}", pos, self.text)
        self.fail("expected number, variable, function call or '('")


def parse(text: str) -> Expression:
    """Parse ``text`` into an expression tree.

    Raises ExpressionSyntaxError (carrying ``position``) on malformed input,
    including the empty string.
    """
    parser = _Parser(text)
    if parser.peek()[0] == "end":
        raise ExpressionSyntaxError("empty expression", 0, text)
    node = parser.expr()
    if parser.peek()[0] != "end":
        parser.fail("unexpected trailing input")
    return node


# ---------------------------------------------------------------- printing

def to_text(e: Expression) -> str:
    """Canonical form: every binary operation and negation parenthesized."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, XVar):
        return f"x[{e.player}][{e.coord}]"
    if isinstance(e, YVar):
        return f"y[{e.coord}]"
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_text(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------- evaluation

@dataclass(frozen=True)
class Binding:
    """Values for the variables of an expression.

    ``x[p-1][k]`` holds coordinate ``k`` of player ``p``; ``y`` is the
    deviation vector or None. Entries may be floats or equally-shaped arrays.
    """
    x: tuple = ()
    y: tuple | None = None

    @classmethod
    def of(cls, x: Sequence[Sequence] = (), y: Sequence | None = None) -> "Binding":
        return cls(tuple(tuple(p) for p in x), None if y is None else tuple(y))

    def lookup(self, var):
        try:
            if isinstance(var, XVar):
                return self.x[var.player - 1][var.coord]
            if self.y is None:
                raise IndexError
            return self.y[var.coord]
        except IndexError:
            raise UnboundVariableError(f"unbound variable {to_text(var)}") from None


def _is_array(v):
    return isinstance(v, np.ndarray)


def _check_domain(ok, message):
    if _is_array(ok):
        if not ok.all():
            raise DomainError(message)
    elif not ok:
        raise DomainError(message)


def _eval(e, b):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, (XVar, YVar)):
        return b.lookup(e)
    if isinstance(e, Neg):
        return -_eval(e.operand, b)
    if isinstance(e, BinOp):
        left = _eval(e.left, b)
        right = _eval(e.right, b)
        op = e.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        _check_domain(right != 0, "division by zero")
        return left / right
    args = [_eval(a, b) for a in e.args]
    name = e.name
    vector = any(_is_array(a) for a in args)
    if name == "min":
        return np.minimum(*args) if vector else min(args)
    if name == "max":
        return np.maximum(*args) if vector else max(args)
    if name == "abs":
        return np.abs(args[0]) if vector else abs(args[0])
    if name == "log":
        _check_domain(args[0] > 0, "log of non-positive value")
        return np.log(args[0]) if vector else math.log(args[0])
    if name == "sqrt":
        _check_domain(args[0] >= 0, "sqrt of negative value")
        return np.sqrt(args[0]) if vector else math.sqrt(args[0])
    if name == "exp":
        if vector:
            with np.errstate(over="ignore"):
                return np.exp(args[0])
        try:
            return math.exp(args[0])
        except OverflowError:
            return math.inf
    if name == "pow":
        base, power = args
        if vector:
            base, power = np.broadcast_arrays(np.asarray(base, float), np.asarray(power, float))
            bad = (base < 0) & (power != np.round(power))
            _check_domain(~bad, "pow of negative base with fractional exponent")
            _check_domain(~((base == 0) & (power < 0)), "pow of zero with negative exponent")
            with np.errstate(over="ignore"):
                return np.power(base, power)
        if base < 0 and power != round(power):
            raise DomainError("pow of negative base with fractional exponent")
        if base == 0 and power < 0:
            raise DomainError("pow of zero with negative exponent")
        try:
            return math.pow(base, power)
        except OverflowError:
            return math.inf
    raise TypeError(f"unknown function {name!r}")


def evaluate(e: Expression, b: Binding = Binding()):
    """Evaluate ``e`` under binding ``b``.

    Returns a float, or an array when the binding holds arrays. Any
    non-finite final result raises DomainError; infinities may appear in
    intermediate values.
    """
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        value = _eval(e, b)
    if _is_array(value):
        if not np.isfinite(value).all():
            raise DomainError("non-finite result")
        return value
    value = float(value)
    if not math.isfinite(value):
        raise DomainError("non-finite result")
    return value


def free_variables(e: Expression) -> frozenset:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, (XVar, YVar)):
            out.add(node)
        elif isinstance(node, Neg):
            stack.append(node.operand)
        elif isinstance(node, BinOp):
            stack.extend((node.left, node.right))
        elif isinstance(node, Call):
            stack.extend(node.args)
    return frozenset(out)


def affine_in(e: Expression, variables: Mapping) -> bool:
    """True if ``e`` is syntactically affine in the given variables.

    Other variables are treated as constants. Conservative: ``x*x`` with both
    factors constant is fine, anything multiplying two variable-dependent
    factors (or dividing by one) is rejected.
    """
    return _affine(e, variables) is not None


def _affine(e, variables):
    # returns "const" or "linear"; None when non-affine
    if isinstance(e, Num):
        return "const"
    if isinstance(e, (XVar, YVar)):
        return "linear" if e in variables else "const"
    if isinstance(e, Neg):
        return _affine(e.operand, variables)
    if isinstance(e, BinOp):
        left = _affine(e.left, variables)
        right = _affine(e.right, variables)
        if left is None or right is None:
            return None
        if e.op in "+-":
            return "const" if left == right == "const" else "linear"
        if e.op == "*":
            if left == "const" or right == "const":
                return "const" if left == right == "const" else "linear"
            return None
        return left if right == "const" else None
    kinds = [_affine(a, variables) for a in e.args]
    return "const" if all(k == "const" for k in kinds) else None

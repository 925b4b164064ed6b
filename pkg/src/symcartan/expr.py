"""Expression strings: tokenizer, recursive-descent parser, and pointwise evaluation.

The same parser serves two consumers. The exact ring (``ring.parse_expr``)
accepts only the ring grammar: rationals, coordinate names, ``+ - * / ^`` with
integer exponents, and ``sin``/``cos`` of an angle coordinate. Closed-form
Killing candidates (``killing.killing_verify``) are parsed in ``numeric`` mode,
which also admits ``exp``, ``log``, ``sqrt`` and arbitrary function arguments.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union


class ParseError(ValueError):
    """Syntax or name error in an expression string, with a 0-based position."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}" + (f" in {text!r}" if text else ""))


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"
    pos: int = 0


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"
    pos: int = 0


Node = Union[Num, Var, Neg, BinOp, Pow, Call]

RING_FUNCTIONS = frozenset({"sin", "cos"})
NUMERIC_FUNCTIONS = frozenset({"sin", "cos", "exp", "log", "sqrt"})

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3), text)
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, numeric: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.functions = NUMERIC_FUNCTIONS if numeric else RING_FUNCTIONS
        self.numeric = numeric

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            raise ParseError(f"expected {value!r}", pos, self.text)

    def error(self, message: str):
        raise ParseError(message, self.peek()[2], self.text)

    def parse(self) -> Node:
        if self.peek()[0] == "end":
            self.error("empty expression")
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.factor(), pos)
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-" and self.peek()[0] == "op":
                self.take()
                sign = -1
            kind, val, _ = self.peek()
            if kind != "int":
                self.error("integer exponent expected")
            self.take()
            node = Pow(node, sign * int(val))
        return node

    def base(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return Num(Fraction(int(val)))
        if kind == "ident":
            self.take()
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if val not in self.functions:
                    raise ParseError(f"unknown function {val!r}", pos, self.text)
                self.take()
                if self.numeric:
                    arg = self.expr()
                else:
                    akind, aval, apos = self.take()
                    if akind != "ident":
                        raise ParseError(f"{val}() takes a coordinate name", apos, self.text)
                    arg = Var(aval, apos)
                self.expect(")")
                return Call(val, arg, pos)
            if val in self.functions:
                raise ParseError(f"function {val!r} needs an argument", pos, self.text)
            return Var(val, pos)
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.factor())
        if kind == "end":
            self.error("unexpected end of expression")
        self.error(f"unexpected token {val!r}")


def parse(text: str, numeric: bool = False) -> Node:
    """Parse ``text`` into an AST. ``numeric`` widens the accepted function set."""
    return _Parser(text, numeric).parse()


def variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables(node.arg)
    if isinstance(node, Pow):
        return variables(node.base)
    return variables(node.left) | variables(node.right)


# ---------------------------------------------------------------------------
# Forward-mode dual numbers with a gradient vector

class Dual:
    """Value plus gradient; exact first derivatives of pointwise expressions."""

    __slots__ = ("val", "grad")

    def __init__(self, val: float, grad):
        self.val = val
        self.grad = grad

    @staticmethod
    def variable(val: float, index: int, size: int) -> "Dual":
        g = [0.0] * size
        g[index] = 1.0
        return Dual(val, g)

    @staticmethod
    def const(val: float, size: int) -> "Dual":
        return Dual(val, [0.0] * size)

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        return Dual(float(other), [0.0] * len(self.grad))

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.val + o.val, [a + b for a, b in zip(self.grad, o.grad)])

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, [-a for a in self.grad])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(self.val * o.val, [self.val * b + o.val * a for a, b in zip(self.grad, o.grad)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        inv = 1.0 / o.val
        return Dual(self.val * inv,
                    [(a * o.val - self.val * b) * inv * inv for a, b in zip(self.grad, o.grad)])

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n: int):
        if n == 0:
            return Dual(1.0, [0.0] * len(self.grad))
        scale = n * self.val ** (n - 1)
        return Dual(self.val ** n, [scale * a for a in self.grad])

    def apply(self, value: float, slope: float) -> "Dual":
        return Dual(value, [slope * a for a in self.grad])


def _dual_func(name: str, x: Dual) -> Dual:
    v = x.val
    if name == "sin":
        return x.apply(math.sin(v), math.cos(v))
    if name == "cos":
        return x.apply(math.cos(v), -math.sin(v))
    if name == "exp":
        e = math.exp(v)
        return x.apply(e, e)
    if name == "log":
        return x.apply(math.log(v), 1.0 / v)
    if name == "sqrt":
        r = math.sqrt(v)
        return x.apply(r, 0.5 / r)
    raise ValueError(f"unknown function {name}")


_FLOAT_FUNCS: dict[str, Callable[[float], float]] = {
    "sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
}


class PoleError(ArithmeticError):
    """Evaluation hit a (numerically) vanishing denominator."""


def evaluate(node: Node, env: dict, pole_tol: float = 1e-12):
    """Evaluate an AST at ``env`` (name -> float or Dual)."""
    if isinstance(node, Num):
        return float(node.value)
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise ParseError(f"unknown identifier {node.name!r}", node.pos) from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env, pole_tol)
    if isinstance(node, Pow):
        b = evaluate(node.base, env, pole_tol)
        if node.exponent < 0:
            if abs(_value(b)) < pole_tol:
                raise PoleError("negative power of zero")
            return 1.0 / (b ** -node.exponent)
        return b ** node.exponent
    if isinstance(node, Call):
        a = evaluate(node.arg, env, pole_tol)
        if isinstance(a, Dual):
            return _dual_func(node.func, a)
        return _FLOAT_FUNCS[node.func](a)
    left = evaluate(node.left, env, pole_tol)
    right = evaluate(node.right, env, pole_tol)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if abs(_value(right)) < pole_tol:
        raise PoleError("division by zero at sample point")
    return left / right


def _value(x) -> float:
    return x.val if isinstance(x, Dual) else x

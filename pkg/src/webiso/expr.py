"""Expression trees for first integrals and their compilation to jets.

Grammar (see docs/grammar.md)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := atom ("^" exponent)?
    exponent := ["-"] INT | "(" ["-"] INT ")"
    atom     := NUMBER | "x" INT | "exp" "(" expr ")" | "(" expr ")"
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .jets import MultiJet, exp_series, jet_inverse, jet_power, uni_compose
from .rationals import ONE, ZERO, Q, bit_size, mpq, qstr

__all__ = [
    "Expression",
    "Var",
    "Const",
    "Add",
    "Sub",
    "Neg",
    "Mul",
    "Div",
    "IntPow",
    "Exp",
    "ExpressionError",
    "ExpressionSyntaxError",
    "ExpansionError",
    "TranscendentalScaleError",
    "parse_expression",
    "expression_from_json",
    "expression_to_json",
    "to_text",
    "expand_to_jet",
    "expand_scaled",
    "evaluate",
    "substitute",
    "node_count",
    "depth",
    "max_var",
    "rational_degrees",
    "degree_profile",
    "var",
    "const",
    "exp",
    "NODE_LIMIT",
    "COEFF_BIT_LIMIT",
]

NODE_LIMIT = 10_000
COEFF_BIT_LIMIT = 2**16


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExpansionError(ExpressionError):
    """The expression cannot be expanded at the requested base point."""


class TranscendentalScaleError(ExpansionError):
    """The expansion carries a factor exp(q), q != 0, which is not rational."""


# ---------------------------------------------------------------------------
# nodes
# ---------------------------------------------------------------------------


class Expression:
    """Base class; the arithmetic operators build trees."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __rtruediv__(self, other):
        return Div(_lift(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ExpressionError("exponents must be integers")
        return IntPow(self, k)

    def __str__(self):
        return to_text(self)


def _lift(value) -> Expression:
    if isinstance(value, Expression):
        return value
    return Const(Q(value))


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expression):
    index: int


@dataclass(frozen=True)
class Const(Expression):
    value: mpq

    def __post_init__(self):
        object.__setattr__(self, "value", Q(self.value))


@dataclass(frozen=True)
class Add(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True)
class Mul(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Div(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class IntPow(Expression):
    base: Expression
    exponent: int


@dataclass(frozen=True)
class Exp(Expression):
    arg: Expression


def var(i: int) -> Var:
    return Var(i)


def const(q) -> Const:
    return Const(Q(q))


def exp(e) -> Exp:
    return Exp(_lift(e))


def _children(e: Expression) -> tuple:
    if isinstance(e, (Var, Const)):
        return ()
    if isinstance(e, (Neg, Exp)):
        return (e.arg,)
    if isinstance(e, IntPow):
        return (e.base,)
    return (e.left, e.right)


def node_count(e: Expression) -> int:
    count, stack = 0, [e]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(_children(node))
    return count


def depth(e: Expression) -> int:
    kids = _children(e)
    return 1 + max((depth(k) for k in kids), default=0)


def max_var(e: Expression) -> int:
    best, stack = 0, [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            best = max(best, node.index)
        stack.extend(_children(node))
    return best


def _check_vars(e: Expression, n: int):
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var) and not 1 <= node.index <= n:
            raise ExpressionError(f"variable x{node.index} out of range 1..{n}")
        stack.extend(_children(node))


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<var>x(?P<idx>\d+))|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text):
        tokens, i = [], 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                raise ExpressionSyntaxError(f"unexpected character {text[i]!r}", i)
            start = m.start(m.lastgroup) if m.lastgroup != "idx" else m.start("var")
            if m.group("num") is not None:
                tokens.append(("num", m.group("num"), start))
            elif m.group("var") is not None:
                tokens.append(("var", int(m.group("idx")), m.start("var")))
            elif m.group("name") is not None:
                tokens.append(("name", m.group("name"), m.start("name")))
            else:
                tokens.append(("op", m.group("op"), m.start("op")))
            i = m.end()
        tokens.append(("end", None, len(text)))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, op):
        kind, val, where = self.take()
        if kind != "op" or val != op:
            raise ExpressionSyntaxError(f"expected {op!r}", where)

    def parse(self) -> Expression:
        e = self.expr()
        kind, val, where = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected token {val!r}", where)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return IntPow(base, self.exponent())
        return base

    def exponent(self) -> int:
        kind, val, where = self.peek()
        paren = kind == "op" and val == "("
        if paren:
            self.take()
        sign = 1
        kind, val, where = self.peek()
        if kind == "op" and val == "-":
            self.take()
            sign = -1
            kind, val, where = self.peek()
        if kind != "num" or not val.isdigit():
            raise ExpressionSyntaxError("non-integer exponent", where)
        self.take()
        k = sign * int(val)
        if paren:
            kind, val, where = self.peek()
            if not (kind == "op" and val == ")"):
                raise ExpressionSyntaxError("non-integer exponent", where)
            self.take()
        return k

    def atom(self):
        kind, val, where = self.take()
        if kind == "num":
            return Const(Q(val))
        if kind == "var":
            if not 1 <= val <= self.n:
                raise ExpressionSyntaxError(f"variable x{val} out of range 1..{self.n}", where)
            return Var(val)
        if kind == "name":
            if val != "exp":
                raise ExpressionSyntaxError(f"unknown function {val!r}", where)
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Exp(e)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExpressionSyntaxError(f"unexpected token {val!r}" if val is not None else "unexpected end of input", where)


def parse_expression(text: str, n: int) -> Expression:
    """Parse ``text`` over variables ``x1..xn``."""
    e = _Parser(text, n).parse()
    if node_count(e) > NODE_LIMIT:
        raise ExpressionError(f"expression has more than {NODE_LIMIT} nodes")
    return e


_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, IntPow: 4}


def to_text(e: Expression) -> str:
    """Render in the input grammar; ``parse_expression(to_text(e))`` rebuilds ``e``."""
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Const):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator) if v >= 0 else f"({v.numerator})"
        return f"({v.numerator}/{v.denominator})" if v >= 0 else f"(({v.numerator})/{v.denominator})"
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        if _PREC.get(type(e.arg), 5) <= 3 and not isinstance(e.arg, Neg):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, IntPow):
        inner = to_text(e.base)
        if not isinstance(e.base, (Var, Exp)):
            inner = f"({inner})"
        return f"{inner}^{e.exponent}" if e.exponent >= 0 else f"{inner}^({e.exponent})"
    p = _PREC[type(e)]
    sym = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    left = to_text(e.left)
    if _PREC.get(type(e.left), 5) < p:
        left = f"({left})"
    right = to_text(e.right)
    rp = _PREC.get(type(e.right), 5)
    # left association: a right operand of equal precedence needs parentheses
    if rp < p or (rp == p and type(e.right) in _PREC):
        right = f"({right})"
    return f"{left} {sym} {right}"


# ---------------------------------------------------------------------------
# JSON trees
# ---------------------------------------------------------------------------

_BINARY = {"add": Add, "sub": Sub, "mul": Mul, "div": Div}


def expression_from_json(tree, n: int) -> Expression:
    """Build from ``{"op": ..., "args": [...]}``, ``{"var": i}``, ``{"const": "p/q"}``."""
    e = _from_json(tree)
    _check_vars(e, n)
    if node_count(e) > NODE_LIMIT:
        raise ExpressionError(f"expression has more than {NODE_LIMIT} nodes")
    return e


def _from_json(tree) -> Expression:
    if isinstance(tree, str):
        raise ExpressionError("string leaves are not allowed inside JSON trees; use {'const': ...}")
    if not isinstance(tree, dict):
        raise ExpressionError(f"malformed expression node: {tree!r}")
    if "var" in tree:
        return Var(int(tree["var"]))
    if "const" in tree:
        return Const(Q(str(tree["const"])))
    op = tree.get("op")
    args = [_from_json(a) for a in tree.get("args", [])]
    if op in ("add", "mul"):
        if len(args) < 2:
            raise ExpressionError(f"{op} needs at least two arguments")
        out = args[0]
        for a in args[1:]:
            out = _BINARY[op](out, a)
        return out
    if op in ("sub", "div"):
        if len(args) != 2:
            raise ExpressionError(f"{op} needs exactly two arguments")
        return _BINARY[op](*args)
    if op == "neg":
        return Neg(_one(op, args))
    if op == "exp":
        return Exp(_one(op, args))
    if op == "pow":
        k = tree.get("exponent")
        if not isinstance(k, int) or isinstance(k, bool):
            raise ExpressionError("pow needs an integer 'exponent'")
        return IntPow(_one(op, args), k)
    raise ExpressionError(f"unknown operator {op!r}")


def _one(op, args):
    if len(args) != 1:
        raise ExpressionError(f"{op} takes exactly one argument")
    return args[0]


def expression_to_json(e: Expression):
    if isinstance(e, Var):
        return {"var": e.index}
    if isinstance(e, Const):
        return {"const": qstr(e.value)}
    if isinstance(e, Neg):
        return {"op": "neg", "args": [expression_to_json(e.arg)]}
    if isinstance(e, Exp):
        return {"op": "exp", "args": [expression_to_json(e.arg)]}
    if isinstance(e, IntPow):
        return {"op": "pow", "args": [expression_to_json(e.base)], "exponent": e.exponent}
    name = {Add: "add", Sub: "sub", Mul: "mul", Div: "div"}[type(e)]
    return {"op": name, "args": [expression_to_json(e.left), expression_to_json(e.right)]}


# ---------------------------------------------------------------------------
# evaluation, substitution, degrees
# ---------------------------------------------------------------------------


def evaluate(e: Expression, point: Sequence) -> mpq:
    """Exact value at a rational point (exp only of arguments that vanish there)."""
    point = [Q(p) for p in point]
    memo: dict[int, mpq] = {}

    def ev(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            v = point[node.index - 1]
        elif isinstance(node, Const):
            v = node.value
        elif isinstance(node, Add):
            v = ev(node.left) + ev(node.right)
        elif isinstance(node, Sub):
            v = ev(node.left) - ev(node.right)
        elif isinstance(node, Mul):
            v = ev(node.left) * ev(node.right)
        elif isinstance(node, Neg):
            v = -ev(node.arg)
        elif isinstance(node, Div):
            d = ev(node.right)
            if d == 0:
                raise ExpansionError(f"division by zero in {to_text(node.right)}")
            v = ev(node.left) / d
        elif isinstance(node, IntPow):
            b = ev(node.base)
            if b == 0 and node.exponent < 0:
                raise ExpansionError(f"division by zero in {to_text(node)}")
            v = b**node.exponent
        elif isinstance(node, Exp):
            a = ev(node.arg)
            if a != 0:
                raise TranscendentalScaleError(f"exp({qstr(a)}) is not rational")
            v = ONE
        else:  # pragma: no cover
            raise ExpressionError(f"unknown node {node!r}")
        memo[key] = v
        return v

    return ev(e)


def substitute(e: Expression, mapping: Mapping[int, Expression]) -> Expression:
    """Replace ``Var(i)`` by ``mapping[i]`` (variables not in the mapping stay)."""
    memo: dict[int, Expression] = {}

    def sub(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            out = _lift(mapping[node.index]) if node.index in mapping else node
        elif isinstance(node, Const):
            out = node
        elif isinstance(node, (Neg, Exp)):
            out = type(node)(sub(node.arg))
        elif isinstance(node, IntPow):
            out = IntPow(sub(node.base), node.exponent)
        else:
            out = type(node)(sub(node.left), sub(node.right))
        memo[key] = out
        return out

    return sub(e)


def rational_degrees(e: Expression):
    """Degrees ``(deg P, deg Q)`` of a representation ``e = P/Q``, or None if exp occurs.

    The representation is the one obtained by clearing denominators node by
    node, so ``Q`` is a product of denominators that the expansion already
    checked to be nonzero at the base point.
    """
    if isinstance(e, Var):
        return (1, 0)
    if isinstance(e, Const):
        return (0, 0)
    if isinstance(e, Exp):
        return None
    if isinstance(e, Neg):
        return rational_degrees(e.arg)
    if isinstance(e, IntPow):
        d = rational_degrees(e.base)
        if d is None:
            return None
        k = e.exponent
        return (k * d[0], k * d[1]) if k >= 0 else (-k * d[1], -k * d[0])
    a, b = rational_degrees(e.left), rational_degrees(e.right)
    if a is None or b is None:
        return None
    if isinstance(e, (Add, Sub)):
        if a[1] == 0 and b[1] == 0:
            return (max(a[0], b[0]), 0)
        return (max(a[0] + b[1], b[0] + a[1]), a[1] + b[1])
    if isinstance(e, Mul):
        return (a[0] + b[0], a[1] + b[1])
    return (a[0] + b[1], a[1] + b[0])


def degree_profile(e: Expression):
    """Degrees ``(deg P, deg Q, deg L)`` of a representation ``e = exp(L) P/Q``, or None.

    ``L`` is a polynomial (degree 0 when no exponential occurs).  Sums are
    only accepted when neither side carries an exponential.
    """
    if isinstance(e, Var):
        return (1, 0, 0)
    if isinstance(e, Const):
        return (0, 0, 0)
    if isinstance(e, Exp):
        a = degree_profile(e.arg)
        if a is None or a[1] != 0 or a[2] != 0:
            return None
        return (0, 0, a[0])
    if isinstance(e, Neg):
        return degree_profile(e.arg)
    if isinstance(e, IntPow):
        d = degree_profile(e.base)
        if d is None:
            return None
        k = e.exponent
        return (k * d[0], k * d[1], d[2]) if k >= 0 else (-k * d[1], -k * d[0], d[2])
    a, b = degree_profile(e.left), degree_profile(e.right)
    if a is None or b is None:
        return None
    if isinstance(e, (Add, Sub)):
        if a[2] or b[2]:
            return None
        if a[1] == 0 and b[1] == 0:
            return (max(a[0], b[0]), 0, 0)
        return (max(a[0] + b[1], b[0] + a[1]), a[1] + b[1], 0)
    ell = max(a[2], b[2])
    if isinstance(e, Mul):
        return (a[0] + b[0], a[1] + b[1], ell)
    return (a[0] + b[1], a[1] + b[0], ell)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------


def expand_scaled(e: Expression, base: Sequence, order: int, *, bit_limit: int = COEFF_BIT_LIMIT):
    """Expand ``e`` at ``base`` as ``exp(q) * jet`` with rational ``q``.

    Returns ``(q, jet)``.  Sums of terms carrying different units exp(q) are
    rejected, as are exponentials of such terms.
    """
    base = tuple(Q(b) for b in base)
    n = len(base)
    _check_vars(e, n)
    if node_count(e) > NODE_LIMIT:
        raise ExpressionError(f"expression has more than {NODE_LIMIT} nodes")
    memo: dict[int, tuple] = {}
    keep = []

    def combine(node, a, b, sign):
        (sa, ja), (sb, jb) = a, b
        if sa == sb or jb.is_zero():
            return (sa, ja + jb if sign > 0 else ja - jb)
        if ja.is_zero():
            return (sb, jb if sign > 0 else -jb)
        raise TranscendentalScaleError(f"sum of terms with different exponential units in {to_text(node)}")

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            out = (ZERO, MultiJet.variable(node.index, n, order, base))
        elif isinstance(node, Const):
            out = (ZERO, MultiJet.constant(node.value, n, order, base))
        elif isinstance(node, Add):
            out = combine(node, go(node.left), go(node.right), +1)
        elif isinstance(node, Sub):
            out = combine(node, go(node.left), go(node.right), -1)
        elif isinstance(node, Neg):
            s, j = go(node.arg)
            out = (s, -j)
        elif isinstance(node, Mul):
            (sa, ja), (sb, jb) = go(node.left), go(node.right)
            out = (sa + sb, ja * jb)
        elif isinstance(node, Div):
            (sa, ja), (sb, jb) = go(node.left), go(node.right)
            if jb.constant_term == 0:
                raise ExpansionError(f"division by zero at the base point: denominator {to_text(node.right)} vanishes")
            out = (sa - sb, ja * jet_inverse(jb))
        elif isinstance(node, IntPow):
            s, j = go(node.base)
            if node.exponent < 0 and j.constant_term == 0:
                raise ExpansionError(f"division by zero at the base point: {to_text(node.base)} vanishes")
            out = (s * node.exponent, jet_power(j, node.exponent))
        elif isinstance(node, Exp):
            s, j = go(node.arg)
            if j.is_zero():
                out = (ZERO, MultiJet.constant(1, n, order, base))
            elif s != 0:
                raise TranscendentalScaleError(f"exponential of a transcendental quantity in {to_text(node)}")
            else:
                c = j.constant_term
                out = (c, uni_compose(exp_series(order, c), j))
        else:  # pragma: no cover
            raise ExpressionError(f"unknown node {node!r}")
        for coeff in out[1].coeffs.values():
            if bit_size(coeff) > bit_limit:
                raise ExpansionError(f"coefficient size exceeds {bit_limit} bits while expanding {to_text(node)[:80]}")
        memo[key] = out
        keep.append(node)
        return out

    return go(e)


def expand_to_jet(e: Expression, base: Sequence, order: int, *, drop_unit: bool = False, bit_limit: int = COEFF_BIT_LIMIT) -> MultiJet:
    """Order-``order`` Taylor expansion of ``e`` at ``base``.

    When the expansion carries a transcendental unit exp(q), q != 0, a
    :class:`TranscendentalScaleError` is raised unless ``drop_unit`` is set,
    in which case the rational jet multiplying the unit is returned.
    """
    q, jet = expand_scaled(e, base, order, bit_limit=bit_limit)
    if q != 0 and not drop_unit:
        raise TranscendentalScaleError(f"expansion carries the unit exp({qstr(q)})")
    return jet

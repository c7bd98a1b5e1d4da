"""Small expression language for functions of ``t``.

Grammar (usual precedence, ``^`` binds tightest and is right associative)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom (("^" | "**") unary)?
    atom    := NUMBER | "t" | "pi" | NAME "(" expr ")" | "(" expr ")"

Numbers are read as exact fractions (``0.25`` is ``1/4``), so expressions
built from rational constants, ``t``, ``+ - * /`` and integer powers are
evaluated exactly on the rational ring.  Recognized functions are ``sin``,
``cos``, ``tan``, ``exp``, ``sqrt``, ``ln`` and ``log`` (natural log).  The
Unicode minus sign is accepted as ``-``.

Examples
--------
>>> f = parse("3/2*t^2 - 1")
>>> [str(c) for c in f.jet(0, 2, "rational").coeffs]
['-1', '0', '3/2']
"""

import math
import re
from fractions import Fraction

from .errors import DomainError, ParseError, SpecError
from .rings import FLOAT, get_ring
from .series import Jet

FUNCTIONS = ("sin", "cos", "tan", "exp", "sqrt", "ln", "log")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text):
    text = text.replace("−", "-")
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = mt.lastgroup
        start = mt.start(kind)
        tokens.append((kind, mt.group(kind), start))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", tok[2])
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            inner = self.unary()
            return ("neg", inner) if op == "-" else inner
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            node = ("^", node, self.unary())
        return node

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return ("num", Fraction(value))
        if kind == "name":
            if value == "t":
                return ("t",)
            if value == "pi":
                return ("pi",)
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", "ln" if value == "log" else value, arg)
            raise ParseError(f"unknown identifier {value!r}", pos)
        if value == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {'end of input' if kind == 'end' else repr(value)}", pos)


def _constant_value(node):
    """Exact value of a ``t``-free node built from numbers, or ``None``."""
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "neg":
        v = _constant_value(node[1])
        return None if v is None else -v
    if tag in ("+", "-", "*", "/"):
        a, b = _constant_value(node[1]), _constant_value(node[2])
        if a is None or b is None:
            return None
        if tag == "+":
            return a + b
        if tag == "-":
            return a - b
        if tag == "*":
            return a * b
        return a / b if b else None
    if tag == "^":
        a, b = _constant_value(node[1]), _constant_value(node[2])
        if a is None or b is None or b.denominator != 1 or (a == 0 and b < 0):
            return None
        return a ** int(b)
    return None


class Expr:
    """A parsed expression in ``t``.

    Attributes
    ----------
    text : str
        Source text.
    tree : tuple
        Syntax tree of nested tuples.
    """

    def __init__(self, text, tree):
        self.text = text
        self.tree = tree

    def __repr__(self):
        return f"Expr({self.text!r})"

    def jet(self, base, order, ring=FLOAT):
        """Taylor jet of the expression at ``t = base``."""
        ring = get_ring(ring)
        t = Jet.variable(ring.coerce(base), order, ring)
        return self._eval(self.tree, t)

    def __call__(self, t):
        """Float value at ``t``."""
        return float(self.jet(float(t), 0, FLOAT).coeffs[0])

    def _eval(self, node, t):
        tag = node[0]
        ring = t.ring
        if tag == "num":
            return Jet.constant(ring.coerce(node[1]), t.order, ring, t.base)
        if tag == "t":
            return t
        if tag == "pi":
            return Jet.constant(ring.coerce(math.pi) if not ring.exact else _no_pi(), t.order, ring, t.base)
        if tag == "neg":
            return -self._eval(node[1], t)
        if tag == "call":
            arg = self._eval(node[2], t)
            return getattr(arg, node[1])()
        if tag == "^":
            base = self._eval(node[1], t)
            ev = _constant_value(node[2])
            if ev is not None and ev.denominator == 1:
                return base ** int(ev)
            return (self._eval(node[2], t) * base.ln()).exp()
        a = self._eval(node[1], t)
        b = self._eval(node[2], t)
        if tag == "+":
            return a + b
        if tag == "-":
            return a - b
        if tag == "*":
            return a * b
        return a / b


def _no_pi():
    raise DomainError("pi is not rational")


def parse(text):
    """Parse ``text`` into an :class:`Expr`.

    Raises
    ------
    ParseError
        With the 0-based ``position`` of the offending token.
    """
    if not isinstance(text, str):
        raise SpecError(f"expression must be a string, got {type(text).__name__}")
    return Expr(text, _Parser(text).parse())

"""Recursive-descent parser for polynomial and stream expressions.

Polynomial grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' nat)?
    base   := coeff | var | '(' expr ')'
    var    := 't' nat            (a bare 't' means t1)
    coeff  := int ('/' nat)?

Stream expressions add an index variable ``k`` (any identifier), indexed
variables ``t[iexpr]``, exponents ``^k`` / ``^(iexpr)`` and ``delta(iexpr)``,
where ``iexpr`` is an affine form ``a*k + b`` with natural a, b.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeffs import QQ, Field
from .polyring import Polynomial


class ParseError(ValueError):
    def __init__(self, text: str, pos: int, expected):
        self.text = text
        self.pos = pos
        self.offset = len(text[:pos].encode("utf-8"))
        self.expected = frozenset(expected)
        found = repr(text[pos]) if pos < len(text) else "end of input"
        super().__init__(
            f"parse error at byte offset {self.offset}: found {found}, "
            f"expected one of: {', '.join(sorted(self.expected))}"
        )


# Affine index expression a*k + b, stored as (a, b).
Affine = tuple[int, int]


def _affine_eval(ix: Affine, k: int | None) -> int:
    a, b = ix
    if a and k is None:
        raise ValueError("index variable used outside a stream")
    return a * (k or 0) + b


class _Parser:
    def __init__(self, text: str, index_var: str | None):
        self.text = text
        self.pos = 0
        self.index_var = index_var

    # -- scanning helpers
    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, *expected):
        self.skip()
        raise ParseError(self.text, self.pos, expected)

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail(repr(ch))
        self.pos += 1

    def nat(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("natural number")
        return int(self.text[start:self.pos])

    def at_index_var(self) -> bool:
        self.skip()
        v = self.index_var
        if not v or not self.text.startswith(v, self.pos):
            return False
        end = self.pos + len(v)
        return end >= len(self.text) or not (self.text[end].isalnum() or self.text[end] == "_")

    def at_word(self, word: str) -> bool:
        self.skip()
        return self.text.startswith(word, self.pos)

    # -- grammar
    def parse(self):
        node = self.expr()
        if self.peek():
            self.fail("'+'", "'-'", "'*'", "'^'", "end of input")
        return node

    def expr(self):
        terms = []
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        t = self.term()
        terms.append(t if sign > 0 else ("neg", t))
        while self.peek() in ("+", "-") and self.peek():
            op = self.peek()
            self.pos += 1
            t = self.term()
            terms.append(t if op == "+" else ("neg", t))
        return terms[0] if len(terms) == 1 else ("add", terms)

    def term(self):
        factors = [self.factor()]
        while self.peek() == "*":
            self.pos += 1
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else ("mul", factors)

    def factor(self):
        base = self.base()
        if self.peek() == "^":
            self.pos += 1
            return ("pow", base, self.exponent())
        return base

    def exponent(self) -> Affine:
        if self.index_var is None:
            return (0, self.nat())
        if self.peek() == "(":
            self.pos += 1
            ix = self.iexpr()
            self.expect(")")
            return ix
        if self.at_index_var():
            self.pos += len(self.index_var)
            return (1, 0)
        if self.peek().isdigit():
            return (0, self.nat())
        self.fail("natural number", repr(self.index_var), "'('")

    def base(self):
        ch = self.peek()
        if ch.isdigit():
            num = self.nat()
            if self.peek() == "/":
                self.pos += 1
                den = self.nat()
                if den == 0:
                    self.pos -= 1
                    self.fail("nonzero denominator")
                return ("num", Fraction(num, den))
            return ("num", Fraction(num))
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if self.index_var is not None and self.at_word("delta"):
            self.pos += len("delta")
            self.expect("(")
            ix = self.iexpr()
            self.expect(")")
            return ("delta", ix)
        if ch == "t":
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos].isdigit():
                idx = self.nat()
                if idx == 0:
                    self.pos -= 1
                    self.fail("variable index >= 1")
                return ("var", (0, idx))
            if self.index_var is not None and self.peek() == "[":
                self.pos += 1
                ix = self.iexpr()
                self.expect("]")
                return ("var", ix)
            return ("var", (0, 1))
        expected = ["integer", "variable", "'('"]
        if self.index_var is not None:
            expected += ["'delta'", repr(self.index_var)]
        self.fail(*expected)

    def iexpr(self) -> Affine:
        a, b = self.iterm()
        while self.peek() == "+":
            self.pos += 1
            a2, b2 = self.iterm()
            a, b = a + a2, b + b2
        return (a, b)

    def iterm(self) -> Affine:
        if self.at_index_var():
            self.pos += len(self.index_var)
            if self.peek() == "*":
                self.pos += 1
                return (self.nat(), 0)
            return (1, 0)
        n = self.nat()
        if self.peek() == "*":
            self.pos += 1
            if not self.at_index_var():
                self.fail(repr(self.index_var))
            self.pos += len(self.index_var)
            return (n, 0)
        return (0, n)


def _evaluate(node, k: int | None, field: Field):
    """Evaluate to a Polynomial, or to a dict z -> Polynomial for delta-valued terms."""
    tag = node[0]
    if tag == "num":
        return Polynomial.constant(node[1], field)
    if tag == "var":
        idx = _affine_eval(node[1], k)
        if idx < 1:
            raise ValueError(f"variable index {idx} < 1 at k={k}")
        return Polynomial.var(idx, field)
    if tag == "delta":
        return {_affine_eval(node[1], k): Polynomial.constant(1, field)}
    if tag == "neg":
        v = _evaluate(node[1], k, field)
        return {z: -p for z, p in v.items()} if isinstance(v, dict) else -v
    if tag == "add":
        vals = [_evaluate(n, k, field) for n in node[1]]
        kinds = {isinstance(v, dict) for v in vals}
        if len(kinds) > 1:
            raise ValueError("cannot add ring-valued and delta-valued terms")
        if isinstance(vals[0], dict):
            out: dict = {}
            for v in vals:
                for z, p in v.items():
                    out[z] = out.get(z, Polynomial.zero(field)) + p
            return {z: p for z, p in out.items() if not p.is_zero()}
        total = Polynomial.zero(field)
        for v in vals:
            total = total + v
        return total
    if tag == "mul":
        acc = Polynomial.constant(1, field)
        for n in node[1]:
            acc = _mul_values(acc, _evaluate(n, k, field))
        return acc
    if tag == "pow":
        base = _evaluate(node[1], k, field)
        e = _affine_eval(node[2], k)
        if isinstance(base, dict):
            if e == 0:
                return Polynomial.constant(1, field)
            return {z: p ** e for z, p in base.items()}
        return base ** e
    raise AssertionError(tag)


def _mul_values(a, b):
    if isinstance(a, dict) and isinstance(b, dict):
        # pointwise product of functions
        return {z: a[z] * b[z] for z in a.keys() & b.keys() if not (a[z] * b[z]).is_zero()}
    if isinstance(a, dict):
        return {z: p * b for z, p in a.items() if not (p * b).is_zero()}
    if isinstance(b, dict):
        return {z: a * p for z, p in b.items() if not (a * p).is_zero()}
    return a * b


def parse_polynomial(text: str, field: Field = QQ) -> Polynomial:
    """Parse a polynomial expression into canonical form."""
    node = _Parser(text, None).parse()
    return _evaluate(node, None, field)


def _has_delta(node) -> bool:
    if node[0] == "delta":
        return True
    if node[0] in ("add", "mul"):
        return any(_has_delta(n) for n in node[1])
    if node[0] in ("neg",):
        return _has_delta(node[1])
    if node[0] == "pow":
        return _has_delta(node[1])
    return False


@dataclass(frozen=True)
class StreamExpr:
    """A parsed stream ``k >= start : sexpr``."""

    index_var: str
    start: int
    ast: tuple
    source: str

    @property
    def delta_valued(self) -> bool:
        return _has_delta(self.ast)

    def evaluate(self, k: int, field: Field = QQ):
        if k < self.start:
            return {} if self.delta_valued else Polynomial.zero(field)
        return _evaluate(self.ast, k, field)


BUILTIN_STREAMS = {
    "@bseries": "k>=1: t[k]^k",
    "@geom": "i: t1^i*delta(i)",
}


def parse_stream(text: str) -> StreamExpr:
    """Parse ``[stream] <k> [>= n] : <sexpr>`` or a built-in name."""
    text = text.strip()
    if text.startswith("@"):
        if text not in BUILTIN_STREAMS:
            raise ParseError(text, 0, sorted(BUILTIN_STREAMS))
        text = BUILTIN_STREAMS[text]
    body = text
    offset = 0
    if body.startswith("stream") and len(body) > 6 and body[6].isspace():
        offset = 6
    colon = body.find(":", offset)
    if colon < 0:
        raise ParseError(text, len(text), ["':'"])
    header = body[offset:colon].strip()
    start = 0
    if ">=" in header:
        name, _, lo = header.partition(">=")
        name = name.strip()
        try:
            start = int(lo.strip())
        except ValueError:
            raise ParseError(text, body.index(">=") + 2, ["natural number"]) from None
    else:
        name = header
    if not name.isidentifier() or name in ("t", "delta"):
        raise ParseError(text, offset, ["index variable name"])
    sexpr = body[colon + 1:]
    try:
        ast = _Parser(sexpr, name).parse()
    except ParseError as err:
        raise ParseError(text, colon + 1 + err.pos, err.expected) from None
    return StreamExpr(name, start, ast, text)

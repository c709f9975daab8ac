"""Element expressions: ``3 + 2*g*p^2 + t``, ``1/(1-p)``.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    atom   := INT | 'p' | 'g' | 't' | '(' expr ')'

Exponents are integer-valued expressions built from literals and ``p``.
Errors carry the 0-based byte offset of the offending token.
"""
from fractions import Fraction

from .errors import ExpressionSyntaxError


def _tokenize(text):
    data = text.encode("utf-8")
    tokens = []
    i = 0
    while i < len(data):
        ch = data[i:i + 1]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(data) and data[j:j + 1].isdigit():
                j += 1
            tokens.append(("int", int(data[i:j]), i))
            i = j
        elif ch in (b"+", b"-", b"*", b"/", b"^", b"(", b")"):
            tokens.append(("op", ch.decode(), i))
            i += 1
        elif ch in (b"p", b"g", b"t"):
            if i + 1 < len(data) and data[i + 1:i + 2].isalnum():
                raise ExpressionSyntaxError("unknown identifier", i)
            tokens.append(("sym", ch.decode(), i))
            i += 1
        else:
            raise ExpressionSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, len(data)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, value, off = self.take()
        if kind != "op" or value != op:
            raise ExpressionSyntaxError(f"expected {op!r}", off)

    def parse(self):
        if self.peek()[0] == "end":
            raise ExpressionSyntaxError("empty expression", self.peek()[2])
        node = self.expr()
        kind, _, off = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError("unexpected trailing input", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            off = self.take()[2]
            exponent = self.unary()
            return ("^", base, exponent, off)
        return base

    def atom(self):
        kind, value, off = self.take()
        if kind == "int":
            return ("int", value)
        if kind == "sym":
            return ("sym", value, off)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionSyntaxError("expected a number, p, g, t or '('", off)


def parse_expression(text):
    """Parse to a small AST (nested tuples); raises ExpressionSyntaxError."""
    return _Parser(text).parse()


def _eval_int(node, p):
    tag = node[0]
    if tag == "int":
        return Fraction(node[1])
    if tag == "sym":
        if node[1] == "p" and p is not None:
            return Fraction(p)
        raise ExpressionSyntaxError("exponent must be an integer", node[2])
    if tag == "neg":
        return -_eval_int(node[1], p)
    if tag == "^":
        e = _eval_int(node[2], p)
        if e.denominator != 1:
            raise ExpressionSyntaxError("exponent must be an integer", node[3])
        return _eval_int(node[1], p) ** int(e)
    a, b = _eval_int(node[1], p), _eval_int(node[2], p)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    if b == 0:
        raise ZeroDivisionError("division by zero in expression")
    return a / b


def evaluate(node, field):
    tag = node[0]
    if tag == "int":
        return field(node[1])
    if tag == "sym":
        name = node[1]
        if name == "p":
            return field(field.p)
        if name == "g":
            return field.gen()
        if field.e == 1:
            raise ExpressionSyntaxError("'t' used in an unramified field", node[2])
        return field.uniformizer()
    if tag == "neg":
        return -evaluate(node[1], field)
    if tag == "^":
        e = _eval_int(node[2], field.p)
        if e.denominator != 1:
            raise ExpressionSyntaxError("exponent must be an integer", node[3])
        return evaluate(node[1], field) ** int(e)
    a, b = evaluate(node[1], field), evaluate(node[2], field)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    return a / b


def parse_element(text, field):
    return evaluate(parse_expression(text), field)


def parse_rational(text):
    """Exact rational from an expression without p, g or t (e.g. '-1/3')."""
    return _eval_int(parse_expression(text), None)


def element_to_string(x):
    """Serialize so that ``parse_element(element_to_string(x), F) == x`` at precision.

    Digits are written in the balanced range, so -1 prints as ``-1`` rather
    than ``p^N - 1``.
    """
    if x.unit is None:
        return "0"
    F = x.field
    p, m = F.p, F.m
    mod = p ** x.rel
    terms = []
    for j in range(F.e):
        for i in range(m):
            c = x.unit[j * m + i]
            if not c:
                continue
            if 2 * c > mod:
                c -= mod
            sign = "-" if c < 0 else "+"
            c = abs(c)
            k = x.shift
            while c % p == 0:
                c //= p
                k += 1
            factors = [str(c)] if c != 1 else []
            if i:
                factors.append("g" if i == 1 else f"g^{i}")
            if j:
                factors.append("t" if j == 1 else f"t^{j}")
            if k > 0:
                factors.append("p" if k == 1 else f"p^{k}")
            body = "*".join(factors) or "1"
            if k < 0:
                body += "/p" if k == -1 else f"/p^{-k}"
            terms.append((sign, body))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out

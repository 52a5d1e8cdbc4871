"""Concrete syntax for differential polynomials and operators.

Grammar::

    expr   := ["+" | "-"] term {("+" | "-") term}
    term   := factor {"*" factor}
    factor := atom ["^" nat]
    atom   := rational | indep | jet | "(" expr ")"      (+ "D", "D1".."Dm" for operators)
    jet    := dep ["_" letters | "[" nat {"," nat} "]"]

Operator text uses the same grammar with ``*`` read as composition, so
``D*u`` is ``u*D + u[1]``. A matrix operator is ``[[e, e], [e, e]]``.
The printer always emits the bracketed jet form, e.g. ``u[2]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..diffops import DiffOperator, compose
from ..jetalgebra import DiffFunction, Signature, jet, zero_index


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.message = message
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


_DEFAULT_INDEP = ("x", "y", "z")
_DEFAULT_DEP = ("u", "v", "w")
_RESERVED = re.compile(r"^D\d*$")


def is_reserved_name(name: str) -> bool:
    return bool(_RESERVED.match(name))


def default_signature(m: int = 1, n: int = 1) -> Signature:
    indep = _DEFAULT_INDEP[:m] if m <= 3 else tuple(f"x{k + 1}" for k in range(m))
    dep = _DEFAULT_DEP[:n] if n <= 3 else tuple(f"u{k + 1}" for k in range(n))
    return Signature(indep, dep)


# -- printing --------------------------------------------------------------------

def _fraction_text(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _guess_signature(F: DiffFunction) -> Signature:
    m, alphas = 1, 0
    for (xp, jp) in F.terms:
        for mu, _ in xp:
            m = max(m, mu + 1)
        for a, _ in jp:
            m = max(m, len(a.i))
            alphas = max(alphas, a.alpha + 1)
    return default_signature(m, max(alphas, 1))


def _dep_name(sig: Signature, alpha: int) -> str:
    names = sig.names
    return names[alpha] if alpha < len(names) else f"u{alpha}"


def _monomial_text(mono, sig: Signature) -> str:
    xp, jp = mono
    factors = []
    for mu, e in xp:
        factors.append(sig.independent[mu] + (f"^{e}" if e > 1 else ""))
    for a, e in jp:
        name = _dep_name(sig, a.alpha)
        if a.order:
            name += "[" + ",".join(str(k) for k in a.i) + "]"
        factors.append(name + (f"^{e}" if e > 1 else ""))
    return "*".join(factors)


def _signed_terms(F: DiffFunction, sig: Signature) -> list[tuple[bool, str]]:
    out = []
    for mono, c in F.sorted_terms():
        neg = c < 0
        mag = -c if neg else c
        body = _monomial_text(mono, sig)
        if not body:
            text = _fraction_text(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_fraction_text(mag)}*{body}"
        out.append((neg, text))
    return out


def _join(terms: list[tuple[bool, str]]) -> str:
    if not terms:
        return "0"
    neg, text = terms[0]
    out = ("-" if neg else "") + text
    for neg, text in terms[1:]:
        out += (" - " if neg else " + ") + text
    return out


def format_function(F: DiffFunction, sig: Signature | None = None) -> str:
    """Canonical text of ``F``; ``parse_expression`` reads it back exactly."""
    if sig is None:
        sig = _guess_signature(F)
    return _join(_signed_terms(F, sig))


def _d_power_text(i, m: int) -> str:
    parts = []
    for mu, e in enumerate(i):
        if e == 0:
            continue
        name = "D" if m == 1 else f"D{mu + 1}"
        parts.append(name + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def _entry_text(entry, m: int, sig: Signature) -> str:
    terms: list[tuple[bool, str]] = []
    for i in sorted(entry, key=lambda i: (sum(i), i), reverse=True):
        coef = entry[i]
        if not any(i):
            terms.extend(_signed_terms(coef, sig))
            continue
        dpow = _d_power_text(i, m)
        if len(coef) == 1:
            (neg, text), = _signed_terms(coef, sig)
            terms.append((neg, dpow if text == "1" else f"{text}*{dpow}"))
        else:
            terms.append((False, f"({format_function(coef, sig)})*{dpow}"))
    return _join(terms)


def format_operator(P: DiffOperator, sig: Signature | None = None) -> str:
    if sig is None:
        alphas = [a.alpha + 1 for c in P.coefficients() for a in c.jet_support()]
        sig = default_signature(P.m, max(alphas + [P.rows, P.cols]))
    if P.shape == (1, 1):
        return _entry_text(P.entry(0, 0), P.m, sig)
    rows = []
    for r in range(P.rows):
        rows.append("[" + ", ".join(_entry_text(P.entry(r, c), P.m, sig) for c in range(P.cols)) + "]")
    return "[" + ", ".join(rows) + "]"


# -- lexing ----------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, OP, END
    text: str
    pos: int
    sub: tuple | str | None = None  # jet subscript: letters str or tuple of ints


_NAME = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_NUM = re.compile(r"\d+")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            mt = _NUM.match(text, pos)
            end = mt.end()
            if end < n and (text[end].isalpha() or text[end] == "_"):
                raise ParseError(f"malformed number {text[pos:end + 1]!r}", pos, text)
            tokens.append(Token("NUM", mt.group(), pos))
            pos = end
            continue
        if ch.isalpha():
            mt = _NAME.match(text, pos)
            start, pos = pos, mt.end()
            sub = None
            if pos < n and text[pos] == "_":
                ms = re.compile(r"[A-Za-z]+").match(text, pos + 1)
                if ms is None:
                    raise ParseError("malformed jet subscript: expected letters after '_'", pos, text)
                sub = ms.group()
                pos = ms.end()
                if pos < n and (text[pos].isalnum() or text[pos] == "_"):
                    raise ParseError("malformed jet subscript", pos, text)
            elif pos < n and text[pos] == "[":
                close = text.find("]", pos)
                if close < 0:
                    raise ParseError("malformed jet subscript: missing ']'", pos, text)
                body = text[pos + 1:close]
                items = [s.strip() for s in body.split(",")]
                if not items or any(not s.isdigit() for s in items):
                    raise ParseError("malformed jet subscript: expected natural numbers", pos + 1, text)
                sub = tuple(int(s) for s in items)
                pos = close + 1
            tokens.append(Token("NAME", mt.group(), start, sub))
            continue
        if ch in "+-*/^()[],":
            tokens.append(Token("OP", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos, text)
    tokens.append(Token("END", "", n))
    return tokens


# -- parsing ---------------------------------------------------------------------

class _FunctionAlgebra:
    operators = False

    def __init__(self, sig: Signature):
        self.sig = sig

    def number(self, c):
        return DiffFunction.constant(c)

    def function(self, f):
        return f

    def d(self, mu):  # pragma: no cover - guarded by operators flag
        raise NotImplementedError

    def mul(self, a, b):
        return a * b

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def pow(self, a, e):
        return a ** e


class _OperatorAlgebra(_FunctionAlgebra):
    operators = True

    def number(self, c):
        return DiffOperator.multiplication(DiffFunction.constant(c), self.sig.m)

    def function(self, f):
        return DiffOperator.multiplication(f, self.sig.m)

    def d(self, mu):
        return DiffOperator.total_d(mu, self.sig.m)

    def mul(self, a, b):
        return compose(a, b)

    def pow(self, a, e):
        out = DiffOperator.identity(1, self.sig.m)
        for _ in range(e):
            out = compose(out, a)
        return out


class _Parser:
    def __init__(self, text: str, sig: Signature, algebra):
        self.text = text
        self.sig = sig
        self.alg = algebra
        self.tokens = tokenize(text)
        self.k = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.k]

    def error(self, message, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.text)

    def advance(self) -> Token:
        t = self.tokens[self.k]
        self.k += 1
        return t

    def accept(self, op: str) -> bool:
        if self.tok.kind == "OP" and self.tok.text == op:
            self.k += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {op!r}, found {found!r}")

    def finish(self):
        if self.tok.kind != "END":
            raise self.error(f"unexpected {self.tok.text!r}")

    def expr(self):
        neg = False
        if self.accept("-"):
            neg = True
        else:
            self.accept("+")
        value = self.term()
        if neg:
            value = self.alg.neg(value)
        while True:
            if self.accept("+"):
                value = self.alg.add(value, self.term())
            elif self.accept("-"):
                value = self.alg.add(value, self.alg.neg(self.term()))
            else:
                return value

    def term(self):
        value = self.factor()
        while self.accept("*"):
            value = self.alg.mul(value, self.factor())
        return value

    def factor(self):
        base = self.atom()
        if self.accept("^"):
            t = self.tok
            if t.kind != "NUM":
                raise self.error("exponent must be a natural number", t)
            self.advance()
            if self.tok.kind == "OP" and self.tok.text == "/":
                raise self.error("exponent must be a natural number", t)
            if self.tok.kind == "OP" and self.tok.text == "^":
                raise self.error("chained exponents need parentheses")
            base = self.alg.pow(base, int(t.text))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            num = int(t.text)
            if self.accept("/"):
                d = self.tok
                if d.kind != "NUM":
                    raise self.error("division is only allowed between integer literals", d)
                self.advance()
                if int(d.text) == 0:
                    raise self.error("division by zero", d)
                return self.alg.number(Fraction(num, int(d.text)))
            return self.alg.number(num)
        if t.kind == "NAME":
            self.advance()
            return self.name(t)
        if self.accept("("):
            value = self.expr()
            self.expect(")")
            return value
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def name(self, t: Token):
        sig = self.sig
        if is_reserved_name(t.text):
            if not self.alg.operators:
                raise self.error(f"{t.text!r} is only valid in operator expressions", t)
            if t.sub is not None:
                raise self.error(f"total derivative {t.text!r} takes no subscript", t)
            if t.text == "D":
                if sig.m != 1:
                    raise self.error("use D1..Dm when there are several independent variables", t)
                return self.alg.d(0)
            mu = int(t.text[1:]) - 1
            if not 0 <= mu < sig.m:
                raise self.error(f"unknown total derivative {t.text!r}", t)
            return self.alg.d(mu)
        if t.text in sig.independent:
            if t.sub is not None:
                raise self.error(f"independent variable {t.text!r} cannot carry a jet subscript", t)
            return self.alg.function(DiffFunction.x(sig.independent.index(t.text)))
        if t.text in sig.names:
            alpha = sig.names.index(t.text)
            return self.alg.function(DiffFunction.var(jet(alpha, self.subscript(t))))
        raise self.error(f"unknown identifier {t.text!r}", t)

    def subscript(self, t: Token):
        m = self.sig.m
        if t.sub is None:
            return zero_index(m)
        if isinstance(t.sub, tuple):
            if len(t.sub) != m:
                raise self.error(f"jet subscript needs {m} entries, got {len(t.sub)}", t)
            return t.sub
        i = [0] * m
        for ch in t.sub:
            if ch not in self.sig.independent:
                raise self.error(f"malformed jet subscript: {ch!r} is not an independent variable", t)
            i[self.sig.independent.index(ch)] += 1
        return tuple(i)


def parse_expression(text: str, sig: Signature | None = None) -> DiffFunction:
    sig = sig or default_signature()
    p = _Parser(text, sig, _FunctionAlgebra(sig))
    if p.tok.kind == "END":
        raise p.error("empty expression")
    value = p.expr()
    p.finish()
    return value


def parse_operator(text: str, sig: Signature | None = None) -> DiffOperator:
    """Scalar operator text, or a ``[[..], [..]]`` matrix of them."""
    sig = sig or default_signature()
    p = _Parser(text, sig, _OperatorAlgebra(sig))
    if p.tok.kind == "END":
        raise p.error("empty operator")
    if p.tok.kind == "OP" and p.tok.text == "[":
        value = _matrix(p)
    else:
        value = p.expr()
    p.finish()
    return value


def _matrix(p: _Parser) -> DiffOperator:
    p.expect("[")
    rows = []
    while True:
        row_tok = p.tok
        p.expect("[")
        row = [p.expr()]
        while p.accept(","):
            row.append(p.expr())
        p.expect("]")
        if rows and len(row) != len(rows[0]):
            raise p.error(f"row has {len(row)} entries, expected {len(rows[0])}", row_tok)
        rows.append(row)
        if not p.accept(","):
            break
    p.expect("]")
    return DiffOperator.from_blocks(rows)


def parse_vector(text: str, sig: Signature | None = None) -> tuple[DiffFunction, ...]:
    """``[e1, ..., ek]`` as a tuple; a bare expression is a 1-tuple."""
    sig = sig or default_signature()
    p = _Parser(text, sig, _FunctionAlgebra(sig))
    if p.tok.kind == "END":
        raise p.error("empty expression")
    if p.accept("["):
        items = [p.expr()]
        while p.accept(","):
            items.append(p.expr())
        p.expect("]")
    else:
        items = [p.expr()]
    p.finish()
    return tuple(items)

"""Normal-form arithmetic in the Weyl algebra Q[x1..xn]<d1..dn>.

Operators are kept in normal order (all x's to the left of all d's), so
each element is a finite sum of terms  coeff * x^a * d^b  indexed by a
pair of exponent vectors.  This makes equality testing trivial and
multiplication a matter of commuting d-powers past x-powers:

    d*x = x*d + 1,   and in general   d^m x^c = sum_t C(m,t) c!/(c-t)! x^(c-t) d^(m-t).

The text format uses tokens x1..xn and d1..dn, e.g. "x1*d1 + 3*d2^2".
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from math import comb, perm
from typing import Iterator

from .errors import VariableCountMismatch
from .grading import GradingSpec

Exponents = tuple[int, ...]
TermKey = tuple[Exponents, Exponents]


class _Inhomogeneous:
    def __repr__(self):
        return "Inhomogeneous"


#: Marker returned by op_degree for operators of mixed degree.
INHOMOGENEOUS = _Inhomogeneous()


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


class WeylOp:
    """A differential operator in normal form over n variables."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms=None):
        if n < 1:
            raise VariableCountMismatch("need at least one variable")
        self.n = n
        data: dict[TermKey, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for (a, b), coeff in items:
                a, b = tuple(a), tuple(b)
                if len(a) != n or len(b) != n:
                    raise VariableCountMismatch("exponent vector of wrong length")
                if any(e < 0 for e in a + b):
                    raise ValueError("negative exponent in Weyl monomial")
                coeff = _frac(coeff)
                if coeff:
                    s = data.get((a, b), Fraction(0)) + coeff
                    if s:
                        data[(a, b)] = s
                    else:
                        data.pop((a, b), None)
        self._terms = data

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "WeylOp":
        return cls(n)

    @classmethod
    def one(cls, n: int) -> "WeylOp":
        return cls.constant(1, n)

    @classmethod
    def constant(cls, value, n: int) -> "WeylOp":
        z = (0,) * n
        return cls(n, {(z, z): _frac(value)})

    @classmethod
    def x(cls, i: int, n: int) -> "WeylOp":
        """The multiplication operator x_{i+1} (i is 0-based)."""
        if not 0 <= i < n:
            raise VariableCountMismatch(f"variable index {i} out of range")
        a = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, {(a, (0,) * n): Fraction(1)})

    @classmethod
    def d(cls, i: int, n: int) -> "WeylOp":
        """The partial derivative d_{i+1} (i is 0-based)."""
        if not 0 <= i < n:
            raise VariableCountMismatch(f"variable index {i} out of range")
        b = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, {((0,) * n, b): Fraction(1)})

    @classmethod
    def monomial(cls, a, b, coeff=1, n: int | None = None) -> "WeylOp":
        a, b = tuple(a), tuple(b)
        return cls(n if n is not None else len(a), {(a, b): _frac(coeff)})

    # -- basic structure ---------------------------------------------------

    def terms(self) -> list[tuple[TermKey, Fraction]]:
        """Terms sorted lexicographically on (a, b)."""
        return [(key, self._terms[key]) for key in sorted(self._terms)]

    def coefficient(self, a, b) -> Fraction:
        return self._terms.get((tuple(a), tuple(b)), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, WeylOp) and self.n == other.n
                and self._terms == other._terms)

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "WeylOp") -> None:
        if self.n != other.n:
            raise VariableCountMismatch(
                f"operators over {self.n} and {other.n} variables")

    def __add__(self, other: "WeylOp") -> "WeylOp":
        self._check(other)
        data = dict(self._terms)
        for key, v in other._terms.items():
            s = data.get(key, Fraction(0)) + v
            if s:
                data[key] = s
            else:
                data.pop(key, None)
        return WeylOp(self.n, data)

    def __neg__(self) -> "WeylOp":
        return WeylOp(self.n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "WeylOp") -> "WeylOp":
        return self + (-other)

    def scale(self, value) -> "WeylOp":
        v = _frac(value)
        return WeylOp(self.n, {k: v * w for k, w in self._terms.items()} if v else None)

    def __mul__(self, other) -> "WeylOp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, WeylOp):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other) -> "WeylOp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "WeylOp":
        if k < 0:
            raise ValueError("negative power of a Weyl operator")
        out = WeylOp.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    # -- printing --------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b), coeff in self.terms():
            factors = []
            for i, e in enumerate(a):
                if e:
                    factors.append(f"x{i + 1}" + (f"^{e}" if e > 1 else ""))
            for i, e in enumerate(b):
                if e:
                    factors.append(f"d{i + 1}" + (f"^{e}" if e > 1 else ""))
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append(("-" if coeff < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"WeylOp({self})"


def multiply(p: WeylOp, q: WeylOp) -> WeylOp:
    """Normal-ordered product p*q."""
    p._check(q)
    n = p.n
    acc: dict[TermKey, Fraction] = {}
    for (a, b), cp in p._terms.items():
        for (c, dd), cq in q._terms.items():
            base = cp * cq
            # commute d^b past x^c one coordinate at a time
            for t in product(*(range(min(bi, ci) + 1) for bi, ci in zip(b, c))):
                coeff = base
                for bi, ci, ti in zip(b, c, t):
                    if ti:
                        coeff *= comb(bi, ti) * perm(ci, ti)
                key = (tuple(ai + ci - ti for ai, ci, ti in zip(a, c, t)),
                       tuple(bi - ti + di for bi, di, ti in zip(b, dd, t)))
                s = acc.get(key, Fraction(0)) + coeff
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
    return WeylOp(n, acc)


def transpose(p: WeylOp) -> WeylOp:
    """The standard transposition: x^a d^b -> (-1)^|b| d^b x^a, renormalised.

    An involutive anti-automorphism: transpose(p*q) = transpose(q)*transpose(p).
    """
    acc: dict[TermKey, Fraction] = {}
    for (a, b), coeff in p._terms.items():
        sign = -1 if sum(b) % 2 else 1
        base = coeff * sign
        # normal-order d^b x^a
        for t in product(*(range(min(bi, ai) + 1) for bi, ai in zip(b, a))):
            v = base
            for bi, ai, ti in zip(b, a, t):
                if ti:
                    v *= comb(bi, ti) * perm(ai, ti)
            key = (tuple(ai - ti for ai, ti in zip(a, t)),
                   tuple(bi - ti for bi, ti in zip(b, t)))
            s = acc.get(key, Fraction(0)) + v
            if s:
                acc[key] = s
            else:
                acc.pop(key, None)
    return WeylOp(p.n, acc)


def op_degree(p: WeylOp, spec: GradingSpec):
    """Common grading degree of all terms, or INHOMOGENEOUS.

    Each monomial x^a d^b is homogeneous of degree deg(x^a) - deg(x^b);
    the zero operator reports the zero degree.
    """
    if spec.n != p.n:
        raise VariableCountMismatch("grading spec over a different variable count")
    degree = None
    for (a, b) in p._terms:
        d = tuple(u - v for u, v in zip(spec.monomial_degree(a),
                                        spec.monomial_degree(b)))
        if degree is None:
            degree = d
        elif degree != d:
            return INHOMOGENEOUS
    return degree if degree is not None else spec.zero()


def euler(n: int) -> WeylOp:
    """The Euler operator x1*d1 + ... + xn*dn."""
    out = WeylOp.zero(n)
    for i in range(n):
        out = out + WeylOp.x(i, n) * WeylOp.d(i, n)
    return out


# -- text format ---------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+|[xd]\d+|[-+*^()/])")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"bad token at: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], n: int):
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of input")
        self.pos += 1
        return tok

    def expr(self) -> WeylOp:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        out = self.term().scale(sign)
        while self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
            out = out + self.term().scale(sign)
        return out

    def term(self) -> WeylOp:
        out = self.factor()
        while self.peek() == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> WeylOp:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if not tok.isdigit():
                raise ValueError(f"expected integer exponent, got {tok!r}")
            base = base ** int(tok)
        return base

    def atom(self) -> WeylOp:
        tok = self.take()
        if tok == "(":
            out = self.expr()
            if self.take() != ")":
                raise ValueError("missing closing parenthesis")
            return out
        if tok.isdigit():
            value = Fraction(int(tok))
            if self.peek() == "/":
                self.take()
                den = self.take()
                if not den.isdigit() or int(den) == 0:
                    raise ValueError("bad rational literal")
                value /= int(den)
            return WeylOp.constant(value, self.n)
        if tok[0] in "xd" and tok[1:].isdigit():
            idx = int(tok[1:]) - 1
            if not 0 <= idx < self.n:
                raise VariableCountMismatch(
                    f"token {tok} exceeds variable count {self.n}")
            maker = WeylOp.x if tok[0] == "x" else WeylOp.d
            return maker(idx, self.n)
        raise ValueError(f"unexpected token {tok!r}")


def parse_op(text: str, n: int | None = None) -> WeylOp:
    """Parse an operator from text; variable count inferred when omitted."""
    tokens = _tokenize(text)
    if n is None:
        indices = [int(t[1:]) for t in tokens if t[0] in "xd" and t[1:].isdigit()]
        if not indices:
            raise ValueError("cannot infer the variable count; pass n")
        n = max(indices)
    parser = _Parser(tokens, n)
    out = parser.expr()
    if parser.peek() is not None:
        raise ValueError(f"trailing input from token {parser.peek()!r}")
    return out

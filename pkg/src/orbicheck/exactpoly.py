"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``arity`` variables is a mapping from exponent tuples to
nonzero ``Fraction`` coefficients. Instances are immutable and always kept in
canonical form, so equality is equality of term mappings.

    >>> a, m = variables(2)
    >>> (a + m) * (a - m) == a**2 - m**2
    True

Division by a single polynomial uses graded lexicographic order in the
declared variable order. A single polynomial is a Groebner basis of the
principal ideal it generates, so a zero remainder decides divisibility.
"""

from __future__ import annotations

import math
import random
import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from . import kernel

INF = math.inf

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]


class NotDivisible(ArithmeticError):
    """Raised by :func:`exact_divide` when the remainder is nonzero."""


class PolySyntaxError(ValueError):
    def __init__(self, message: str, column: int, text: str = ""):
        super().__init__(f"{message} (column {column})")
        self.column = column
        self.text = text


class Poly:
    __slots__ = ("arity", "_terms", "_hash")

    def __init__(self, arity: int, terms: Mapping[Exponent, Scalar] | None = None):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != arity:
                raise ValueError(f"exponent {e} does not have length {arity}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.arity = arity
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, arity: int, terms: dict) -> "Poly":
        obj = cls.__new__(cls)
        obj.arity = arity
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, arity: int, value: Scalar) -> "Poly":
        value = Fraction(value)
        return cls._raw(arity, {(0,) * arity: value} if value else {})

    @classmethod
    def variable(cls, arity: int, index: int) -> "Poly":
        if not 0 <= index < arity:
            raise IndexError(f"variable index {index} out of range for arity {arity}")
        e = [0] * arity
        e[index] = 1
        return cls._raw(arity, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: Scalar = 1) -> "Poly":
        return cls(len(exponent), {tuple(exponent): coeff})

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        """Value at the origin; for constant polynomials, the constant."""
        return self._terms.get((0,) * self.arity, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self._terms), default=-1)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        e = max(self._terms, key=lambda e: (sum(e), e))
        return e, self._terms[e]

    def variables_used(self) -> set[int]:
        return {i for e in self._terms for i, x in enumerate(e) if x}

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.arity != self.arity:
                raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.arity, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(self.arity, kernel.add_terms(self._terms, other._terms, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(self.arity, kernel.add_terms(self._terms, other._terms, -1))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Poly._raw(self.arity, {e: -c for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw(self.arity, {})
            return Poly._raw(self.arity, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(self.arity, kernel.mul_terms(self._terms, other._terms))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.arity, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.arity == other.arity and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.constant(self.arity, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, frozenset(self._terms.items())))
        return self._hash

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.arity:
            raise ValueError("point has wrong length")
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= Fraction(x) ** k
            total += term
        return total

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(self.arity)]
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=lambda e: (sum(e), e), reverse=True):
            c = self._terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self.to_str()!r}, arity={self.arity})"


def variables(arity: int) -> list[Poly]:
    return [Poly.variable(arity, i) for i in range(arity)]


def poly_arithmetic(p: Poly, q: Poly, op: str) -> Poly:
    if p.arity != q.arity:
        raise ValueError(f"arity mismatch: {p.arity} vs {q.arity}")
    if op == "add":
        return p + q
    if op == "subtract":
        return p - q
    if op == "multiply":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def divide(g: Poly, p: Poly) -> tuple[Poly, Poly]:
    """Multivariate division of ``g`` by ``p``; returns ``(quotient, remainder)``."""
    if g.arity != p.arity:
        raise ValueError(f"arity mismatch: {g.arity} vs {p.arity}")
    if p.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    q, r = kernel.divmod_terms(g._terms, p._terms)
    return Poly._raw(g.arity, q), Poly._raw(g.arity, r)


def exact_divide(g: Poly, p: Poly) -> Poly:
    """Return ``q`` with ``g == q * p``; raise :class:`NotDivisible` otherwise."""
    q, r = divide(g, p)
    if r:
        raise NotDivisible(f"nonzero remainder {r.to_str()}")
    return q


def divides(p: Poly, g: Poly) -> bool:
    return not divide(g, p)[1]


def vanishing_order(g: Poly, p: Poly) -> int | float:
    """Largest ``k`` with ``p**k`` dividing ``g``; ``INF`` when ``g`` is zero.

    This is the coefficient of ``{p = 0}`` in the divisor of ``g`` provided
    ``p`` is irreducible.
    """
    if p.is_constant():
        raise ValueError("vanishing order along a constant polynomial is undefined")
    if g.is_zero():
        return INF
    var = _coordinate_index(p)
    if var is not None:
        return min(e[var] for e in g._terms)
    k = 0
    while True:
        q, r = divide(g, p)
        if r:
            return k
        g = q
        k += 1


def _coordinate_index(p: Poly) -> int | None:
    """``i`` if ``p`` is a nonzero multiple of the variable ``x_i``."""
    if len(p._terms) != 1:
        return None
    (e,) = p._terms
    if sum(e) != 1:
        return None
    return e.index(1)


def strip_factor(g: Poly, p: Poly) -> tuple[int, Poly]:
    """Return ``(k, u)`` with ``g == u * p**k`` and ``p`` not dividing ``u``."""
    if p.is_constant():
        raise ValueError("cannot strip a constant factor")
    if g.is_zero():
        return INF, g
    var = _coordinate_index(p)
    if var is not None:
        k = min(e[var] for e in g._terms)
        scale = p._terms[next(iter(p._terms))] ** k
        out = {}
        for e, c in g._terms.items():
            d = list(e)
            d[var] -= k
            out[tuple(d)] = c / scale
        return k, Poly._raw(g.arity, out)
    k = 0
    while True:
        q, r = divide(g, p)
        if r:
            return k, g
        g = q
        k += 1


def substitute(g: Poly, images: Sequence[Poly]) -> Poly:
    """Replace variable ``i`` of ``g`` by ``images[i]`` and expand."""
    if len(images) != g.arity:
        raise ValueError(f"need {g.arity} images, got {len(images)}")
    if not images:
        raise ValueError("cannot substitute into a polynomial in zero variables")
    arity = images[0].arity
    if any(im.arity != arity for im in images):
        raise ValueError("images must share one arity")
    powers: list[dict[int, Poly]] = [{0: Poly.constant(arity, 1), 1: im} for im in images]

    def power(i: int, k: int) -> Poly:
        cache = powers[i]
        if k not in cache:
            half = power(i, k // 2)
            sq = half * half
            cache[k] = sq * images[i] if k % 2 else sq
        return cache[k]

    result: dict = {}
    for e, c in g._terms.items():
        term = Poly.constant(arity, c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        result = kernel.add_terms(result, term._terms, 1)
    return Poly._raw(arity, result)


def partial_derivative(g: Poly, index: int) -> Poly:
    if not 0 <= index < g.arity:
        raise IndexError(f"variable index {index} out of range for arity {g.arity}")
    out = {}
    for e, c in g._terms.items():
        k = e[index]
        if k:
            d = list(e)
            d[index] = k - 1
            out[tuple(d)] = c * k
    return Poly._raw(g.arity, out)


def gradient(g: Poly) -> list[Poly]:
    return [partial_derivative(g, i) for i in range(g.arity)]


def extend(g: Poly, arity: int, positions: Sequence[int] | None = None) -> Poly:
    """Embed ``g`` into a ring with ``arity`` variables.

    Variable ``i`` of ``g`` becomes variable ``positions[i]`` (default ``i``).
    """
    if positions is None:
        positions = range(g.arity)
    positions = list(positions)
    out = {}
    for e, c in g._terms.items():
        new = [0] * arity
        for i, k in zip(positions, e):
            new[i] = k
        out[tuple(new)] = c
    return Poly._raw(arity, out)


# -- univariate helpers for the irreducibility sanity check -------------------


def _uni_trim(c: list[Fraction]) -> list[Fraction]:
    while c and not c[-1]:
        c.pop()
    return c


def _uni_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, x in enumerate(b):
            a[shift + i] -= f * x
        _uni_trim(a)
        if not a:
            break
    return a


def univariate_gcd_degree(coeffs: Sequence[Fraction]) -> int:
    """Degree of gcd(h, h') for the univariate ``h`` given by ``coeffs``."""
    a = _uni_trim([Fraction(c) for c in coeffs])
    b = _uni_trim([c * i for i, c in enumerate(a)][1:])
    if not b:
        return max(len(a) - 1, 0)
    while b:
        a, b = b, _uni_trim(_uni_rem(a, b))
    return len(a) - 1


def specialize(g: Poly, keep: int, point: Sequence[Scalar]) -> list[Fraction]:
    """Set every variable except ``keep`` to ``point`` and return the
    univariate coefficient list (lowest degree first)."""
    coeffs: dict[int, Fraction] = {}
    for e, c in g._terms.items():
        v = Fraction(c)
        for i, k in enumerate(e):
            if i != keep and k:
                v *= Fraction(point[i]) ** k
        coeffs[e[keep]] = coeffs.get(e[keep], 0) + v
    top = max(coeffs, default=-1)
    return _uni_trim([coeffs.get(i, Fraction(0)) for i in range(top + 1)])


def looks_squarefree(p: Poly, trials: int = 3, seed: int = 0) -> bool:
    """Best-effort square-freeness test along single-variable specializations.

    Fails only if, for some variable, every one of ``trials`` random rational
    specializations of the other variables has a repeated root.
    """
    rng = random.Random(seed)
    for var in sorted(p.variables_used()):
        bad = 0
        for _ in range(trials):
            pt = [Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for _ in range(p.arity)]
            h = specialize(p, var, pt)
            if len(h) <= 1 or univariate_gcd_degree(h) == 0:
                break
            bad += 1
        if bad == trials:
            return False
    return True


# -- text syntax ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*^()/":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3) + 1, text)
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Mapping[str, int], arity: int):
        self.text = text
        self.names = names
        self.arity = arity
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok):
        raise PolySyntaxError(msg, tok[2] + 1, self.text)

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty polynomial", self.peek())
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("name", "num") or tok[1] == "(":
                self.error("implicit multiplication is not allowed; use '*'", tok)
            self.error(f"unexpected token {tok[1]!r}", tok)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> Poly:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            p = self.factor()
            return -p if tok[1] == "-" else p
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.error("exponent must be a non-negative integer literal", tok)
            base = base ** int(tok[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            value = Fraction(int(val))
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den = self.take()
                if den[0] != "num":
                    self.error("rational literal needs an integer denominator", den)
                if int(den[1]) == 0:
                    self.error("zero denominator", den)
                value /= int(den[1])
            return Poly.constant(self.arity, value)
        if kind == "name":
            if val not in self.names:
                self.error(f"unknown variable {val!r}", tok)
            return Poly.variable(self.arity, self.names[val])
        if kind == "op" and val == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close)
            return p
        if kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {val!r}", tok)


def parse_poly(text: str, names: Sequence[str] | Mapping[str, int]) -> Poly:
    """Parse ``text`` in the polynomial syntax over the given variable names.

    ``names`` is either an ordered list of variable names or a mapping from
    name to variable index (useful for aliases).
    """
    if isinstance(names, Mapping):
        mapping = dict(names)
        arity = max(mapping.values(), default=-1) + 1
    else:
        mapping = {n: i for i, n in enumerate(names)}
        arity = len(names)
    return _Parser(text, mapping, arity).parse()


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


def product(polys: Iterable[Poly], arity: int) -> Poly:
    out = Poly.constant(arity, 1)
    for p in polys:
        out = out * p
    return out

"""Symmetric logarithmic differentials on a C-pair and their pullbacks.

Symmetric forms of degree ``n`` are stored as homogeneous polynomials of
degree ``n`` in the symbols ``dx_1 .. dx_d``; the symmetric product is then
ordinary commutative multiplication and multinomial factors are absorbed into
the coefficients.

:class:`SymLogForm` writes a form in the logarithmic basis: a term
``(alpha, v) -> c`` means ``c * x^alpha * prod_k b_k^{v_k}`` with
``b_k = dx_k / x_k`` for boundary variables (multiplicity >= 2 or inf) and
``b_k = dx_k`` for the others. :class:`RationalSymForm` uses the plain ``dx``
basis with rational-function coefficients kept as unreduced fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, Mapping, Sequence

from .exactpoly import INF, Poly, partial_derivative, vanishing_order
from .geometry import ChartMap
from .orbifold import CPair, MorphismData, Verdict, check_multiplicity


class PullbackUndefined(ArithmeticError):
    """The map sends the source chart into a pole of the form."""


def multidegrees(d: int, n: int) -> Iterator[tuple[int, ...]]:
    """All ``v`` in ``Z_{>=0}^d`` with ``sum(v) == n``, in lexicographic order."""
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in multidegrees(d - 1, n - first):
            yield (first,) + rest


def ceil_ratio(v: int, m) -> int:
    """``ceil(v / m)`` with ``ceil(v / inf) = 0`` for ``v >= 0``."""
    if m == INF:
        return 0
    return -(-v // m)


def _is_boundary(m) -> bool:
    return m == INF or m >= 2


@dataclass(frozen=True)
class SymLogForm:
    arity: int
    degree: int
    multiplicities: tuple
    terms: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Fraction]

    def __post_init__(self):
        mults = tuple(check_multiplicity(m) for m in self.multiplicities)
        if len(mults) != self.arity:
            raise ValueError("one multiplicity per variable is required")
        clean = {}
        for (alpha, v), c in dict(self.terms).items():
            alpha, v = tuple(alpha), tuple(v)
            if len(alpha) != self.arity or len(v) != self.arity:
                raise ValueError("exponent vectors must have length arity")
            if any(x < 0 for x in v) or sum(v) != self.degree:
                raise ValueError(f"multidegree {v} does not have degree {self.degree}")
            c = Fraction(c)
            if c:
                clean[(alpha, v)] = clean.get((alpha, v), 0) + c
        object.__setattr__(self, "multiplicities", mults)
        object.__setattr__(self, "terms", {k: c for k, c in clean.items() if c})

    def to_rational(self) -> "RationalSymForm":
        d = self.arity
        out = RationalSymForm.zero(d, self.degree)
        for (alpha, v), c in self.terms.items():
            expo = [a - (vk if _is_boundary(m) else 0)
                    for a, vk, m in zip(alpha, v, self.multiplicities)]
            num = Poly.monomial(tuple(max(x, 0) for x in expo), c)
            den = Poly.monomial(tuple(max(-x, 0) for x in expo))
            out = out + RationalSymForm(d, self.degree, {v: (num, den)})
        return out


def sheaf_membership(form: SymLogForm):
    """Whether ``form`` is a section of the symmetric C-pair differentials.

    Returns ``(True, None)`` or ``(False, term)`` for the first offending term.
    """
    for (alpha, v), _ in sorted(form.terms.items()):
        for a, vk, m in zip(alpha, v, form.multiplicities):
            need = ceil_ratio(vk, m) if _is_boundary(m) else 0
            if a < need:
                return False, (alpha, v)
    return True, None


def local_generators(d: int, n: int, multiplicities: Sequence) -> list[SymLogForm]:
    """One generator ``x^{ceil(v/m)} prod (dx_k/x_k)^{v_k}`` per multidegree."""
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    mults = tuple(check_multiplicity(m) for m in multiplicities)
    if len(mults) != d:
        raise ValueError("one multiplicity per variable is required")
    gens = []
    for v in multidegrees(d, n):
        alpha = tuple(ceil_ratio(vk, m) if _is_boundary(m) else 0 for vk, m in zip(v, mults))
        gens.append(SymLogForm(d, n, mults, {(alpha, v): 1}))
    return gens


class RationalSymForm:
    """Symmetric form ``sum_beta (num_beta / den_beta) dx^beta``."""

    __slots__ = ("arity", "degree", "terms")

    def __init__(self, arity: int, degree: int, terms: Mapping[tuple[int, ...], tuple[Poly, Poly]]):
        clean = {}
        for beta, (num, den) in terms.items():
            beta = tuple(beta)
            if len(beta) != arity or sum(beta) != degree or min(beta, default=0) < 0:
                raise ValueError(f"bad multidegree {beta} for degree {degree}")
            if den.is_zero():
                raise ZeroDivisionError("zero denominator in symmetric form")
            if num.is_zero():
                continue
            clean[beta] = (num, den)
        self.arity = arity
        self.degree = degree
        self.terms = clean

    @classmethod
    def zero(cls, arity: int, degree: int) -> "RationalSymForm":
        return cls(arity, degree, {})

    @classmethod
    def polynomial(cls, arity: int, degree: int, coeffs: Mapping[tuple[int, ...], Poly]):
        one = Poly.constant(arity, 1)
        return cls(arity, degree, {beta: (c, one) for beta, c in coeffs.items()})

    @classmethod
    def differential(cls, g: Poly) -> "RationalSymForm":
        d = g.arity
        one = Poly.constant(d, 1)
        terms = {}
        for i in range(d):
            beta = tuple(1 if j == i else 0 for j in range(d))
            terms[beta] = (partial_derivative(g, i), one)
        return cls(d, 1, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "RationalSymForm") -> "RationalSymForm":
        if (self.arity, self.degree) != (other.arity, other.degree):
            raise ValueError("cannot add forms of different shape")
        terms = dict(self.terms)
        for beta, (n2, d2) in other.terms.items():
            if beta not in terms:
                terms[beta] = (n2, d2)
                continue
            n1, d1 = terms[beta]
            if d1 == d2:
                terms[beta] = (n1 + n2, d1)
            else:
                terms[beta] = (n1 * d2 + n2 * d1, d1 * d2)
        return RationalSymForm(self.arity, self.degree, terms)

    def scale(self, num: Poly, den: Poly | None = None) -> "RationalSymForm":
        terms = {}
        for beta, (n, d) in self.terms.items():
            terms[beta] = (n * num, d if den is None else d * den)
        return RationalSymForm(self.arity, self.degree, terms)

    def __mul__(self, other: "RationalSymForm") -> "RationalSymForm":
        if self.arity != other.arity:
            raise ValueError("cannot multiply forms of different arity")
        out = RationalSymForm.zero(self.arity, self.degree + other.degree)
        for b1, (n1, d1) in self.terms.items():
            part = {}
            for b2, (n2, d2) in other.terms.items():
                beta = tuple(x + y for x, y in zip(b1, b2))
                part[beta] = (n1 * n2, d1 * d2)
            out = out + RationalSymForm(self.arity, out.degree, part)
        return out

    def power(self, k: int) -> "RationalSymForm":
        if k < 0:
            raise ValueError("negative power")
        d = self.arity
        if k == 0:
            one = Poly.constant(d, 1)
            return RationalSymForm(d, 0, {(0,) * d: (one, one)})
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    def equivalent(self, other: "RationalSymForm") -> bool:
        """Equality as forms with rational-function coefficients."""
        if (self.arity, self.degree) != (other.arity, other.degree):
            return False
        if set(self.terms) != set(other.terms):
            return False
        for beta, (n1, d1) in self.terms.items():
            n2, d2 = other.terms[beta]
            if n1 * d2 != n2 * d1:
                return False
        return True

    def __repr__(self):
        return f"RationalSymForm(arity={self.arity}, degree={self.degree}, terms={len(self.terms)})"


def pullback_form(fmap: ChartMap, form) -> RationalSymForm:
    """Pull ``form`` (on the target chart) back along ``fmap``."""
    if isinstance(form, SymLogForm):
        form = form.to_rational()
    if form.arity != fmap.target_dim:
        raise ValueError(f"form has arity {form.arity}, map target has dimension {fmap.target_dim}")
    d = fmap.source_dim
    dfs = [RationalSymForm.differential(fj) for fj in fmap.components]
    cache: dict[tuple[int, int], RationalSymForm] = {}

    def dpow(j: int, k: int) -> RationalSymForm:
        if (j, k) not in cache:
            cache[(j, k)] = dfs[j] if k == 1 else dpow(j, k - 1) * dfs[j]
        return cache[(j, k)]

    one = Poly.constant(d, 1)
    out = RationalSymForm.zero(d, form.degree)
    for beta, (num, den) in form.terms.items():
        pden = fmap.pull(den)
        if pden.is_zero():
            raise PullbackUndefined(f"chart {fmap.source} maps into a pole of the form")
        pnum = fmap.pull(num)
        piece = RationalSymForm(d, 0, {(0,) * d: (one, one)})
        for j, k in enumerate(beta):
            if k:
                piece = piece * dpow(j, k)
        out = out + piece.scale(pnum, pden)
    return out


def form_order_along(form: RationalSymForm, p: Poly) -> int | float:
    """Order of ``form`` along ``{p = 0}``: negative means a pole."""
    if p.is_constant():
        raise ValueError("order along a constant polynomial is undefined")
    best = INF
    for num, den in form.terms.values():
        order = vanishing_order(num, p) - vanishing_order(den, p)
        best = min(best, order)
    return best


def probe_form(q: Poly, m, N: int) -> RationalSymForm:
    """``dq^N / q^{N(1 - 1/m)}`` on the chart of ``q``."""
    m = check_multiplicity(m)
    if m == INF:
        e = N
    else:
        if N % m:
            raise ValueError(f"N = {N} is not a multiple of {m}")
        e = N - N // m
    dq = RationalSymForm.differential(q)
    return dq.power(N).scale(Poly.constant(q.arity, 1), q ** e)


@dataclass(frozen=True)
class OrderRecord:
    divisor: str
    chart: str
    component: str
    order: int | float


@dataclass(frozen=True)
class FormsResult:
    verdict: Verdict
    N: int
    records: tuple[OrderRecord, ...]
    witness: OrderRecord | None = None
    notes: tuple[str, ...] = ()


def default_N(boundary) -> int:
    return lcm(*[m for _, m in boundary.items() if m != INF] or [1])


def detect_cpair_forms(f: MorphismData, target: CPair, N: int | None = None,
                       components=None, charts=None) -> FormsResult:
    """Decide the C-pair condition for ``f: X -> target`` through pullbacks of
    the test forms ``dy^N / y^{N(1-1/m)}``.

    Regularity is checked along the declared source components only.
    """
    finite = [m for _, m in target.boundary.items() if m != INF]
    if N is None:
        N = default_N(target.boundary)
    if N < 1:
        raise ValueError("N must be positive")
    bad = [m for m in finite if N % m]
    if bad:
        raise ValueError(f"N = {N} is not a multiple of the multiplicities {bad}")
    comps = f.components if components is None else components
    wanted = None if charts is None else set(charts)
    records = []
    notes = []
    factoring = []
    for label, m in target.boundary.items():
        divisor = target.geometry[label]
        chart_hits = 0
        chart_zero = 0
        for fmap in f.maps:
            if wanted is not None and fmap.source not in wanted:
                continue
            q = divisor.equations.get(fmap.target)
            if q is None:
                continue
            chart_hits += 1
            if fmap.pull(q).is_zero():
                chart_zero += 1
                notes.append(f"{label}: chart {fmap.source} factors through the divisor")
                continue
            pulled = pullback_form(fmap, probe_form(q, m, N))
            for comp in comps:
                p = comp.equations.get(fmap.source)
                if p is None:
                    continue
                records.append(OrderRecord(label, fmap.source, comp.label,
                                           form_order_along(pulled, p)))
        if chart_hits and chart_zero == chart_hits:
            factoring.append(label)
    if factoring:
        return FormsResult(Verdict.FACTORS_THROUGH, N, tuple(records), None,
                           tuple(notes) + (f"f factors through {', '.join(factoring)}",))
    witness = next((r for r in records if r.order < 0), None)
    if witness is not None:
        verdict = Verdict.NO
    elif len(finite) < len(target.boundary):
        verdict = Verdict.PARTIAL
        notes.append("floor components: disjointness is not detectable by forms")
    else:
        verdict = Verdict.YES
    return FormsResult(verdict, N, tuple(records), witness, tuple(notes))

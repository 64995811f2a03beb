"""Pure-Python polynomial kernels.

Terms are plain dicts mapping exponent tuples to ``Fraction`` coefficients.
The compiled ``_ckernel`` module implements the same functions with the same
signatures; ``orbicheck.kernel`` picks one at import time.
"""

from fractions import Fraction
from heapq import heappop, heappush
from math import lcm
from operator import add as _add
from operator import sub as _sub

BACKEND = "python"


def _integral(terms):
    den = 1
    for c in terms.values():
        den = lcm(den, c.denominator)
    return {e: c.numerator * (den // c.denominator) for e, c in terms.items()}, den


def add_terms(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c if sign > 0 else -c
        else:
            v = v + c if sign > 0 else v - c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def mul_terms(a, b):
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    ia, da = _integral(a)
    ib, db = _integral(b)
    acc = {}
    get = acc.get
    for eb, cb in ib.items():
        for ea, ca in ia.items():
            e = tuple(map(_add, ea, eb))
            acc[e] = get(e, 0) + ca * cb
    den = da * db
    return {e: Fraction(c, den) for e, c in acc.items() if c}


def scale_shift(terms, coeff, shift):
    """Return ``coeff * x^shift * terms``."""
    return {tuple(map(_add, e, shift)): c * coeff for e, c in terms.items()}


def _grlex_key(e):
    # min-heap on the negated grlex key pops the grlex-largest monomial first
    return (-sum(e), tuple(-x for x in e))


def divmod_terms(g, p):
    """Divide ``g`` by the single polynomial ``p`` under grlex order.

    Returns ``(quotient, remainder)`` with ``g == quotient * p + remainder`` and
    no monomial of the remainder divisible by the leading monomial of ``p``.
    """
    if not p:
        raise ZeroDivisionError("division by the zero polynomial")
    lead = max(p, key=lambda e: (sum(e), e))
    lc = p[lead]
    tail = [(e, c) for e, c in p.items() if e != lead]
    work = dict(g)
    heap = [_grlex_key(e) for e in work]
    heap.sort()
    seen = set(work)
    quo = {}
    rem = {}
    while heap:
        k = heappop(heap)
        e = tuple(-x for x in k[1])
        seen.discard(e)
        c = work.pop(e, None)
        if c is None:
            continue
        shift = tuple(map(_sub, e, lead))
        if min(shift) < 0:
            rem[e] = c
            continue
        t = c / lc
        quo[shift] = t
        for ep, cp in tail:
            m = tuple(map(_add, ep, shift))
            v = work.get(m)
            if v is None:
                work[m] = -t * cp
                if m not in seen:
                    seen.add(m)
                    heappush(heap, _grlex_key(m))
            else:
                v = v - t * cp
                if v:
                    work[m] = v
                else:
                    del work[m]
    return quo, rem

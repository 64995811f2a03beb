# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled polynomial kernels; same contract as ``_pykernel``."""

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF
from libc.stdlib cimport malloc, free

from fractions import Fraction
from heapq import heappop, heappush
from math import lcm

BACKEND = "cython"


cdef long* _pack(list exps, Py_ssize_t n):
    cdef Py_ssize_t k, i, m = len(exps)
    cdef long* buf = <long*>malloc(max(m * n, 1) * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    for k in range(m):
        e = <tuple>exps[k]
        for i in range(n):
            buf[k * n + i] = e[i]
    return buf


cdef inline tuple _mk(long* a, long* b, Py_ssize_t n, int sign):
    cdef Py_ssize_t i
    cdef tuple t = PyTuple_New(n)
    for i in range(n):
        v = a[i] + sign * b[i]
        Py_INCREF(v)
        PyTuple_SET_ITEM(t, i, v)
    return t


def _integral(dict terms):
    den = 1
    for c in terms.values():
        den = lcm(den, c.denominator)
    return {e: c.numerator * (den // c.denominator) for e, c in terms.items()}, den


def add_terms(dict a, dict b, int sign=1):
    cdef dict out = dict(a)
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


def mul_terms(dict a, dict b):
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    ia, da = _integral(a)
    ib, db = _integral(b)
    cdef list ea = list(ia.keys()), eb = list(ib.keys())
    cdef list ca = list(ia.values()), cb = list(ib.values())
    cdef Py_ssize_t n = len(ea[0])
    cdef Py_ssize_t na = len(ea), nb = len(eb), i, j
    cdef long* pa = _pack(ea, n)
    cdef long* pb = _pack(eb, n)
    cdef dict acc = {}
    cdef tuple e
    try:
        for j in range(nb):
            y = cb[j]
            for i in range(na):
                e = _mk(pa + i * n, pb + j * n, n, 1)
                v = acc.get(e)
                if v is None:
                    acc[e] = ca[i] * y
                else:
                    acc[e] = v + ca[i] * y
    finally:
        free(pa)
        free(pb)
    den = da * db
    return {e: Fraction(c, den) for e, c in acc.items() if c}


def scale_shift(dict terms, coeff, tuple shift):
    cdef Py_ssize_t n = len(shift), i
    cdef dict out = {}
    for e, c in terms.items():
        out[tuple([e[i] + shift[i] for i in range(n)])] = c * coeff
    return out


cdef tuple _grlex_key(tuple e):
    cdef long s = 0
    cdef Py_ssize_t i, n = len(e)
    cdef tuple neg = PyTuple_New(n)
    for i in range(n):
        x = e[i]
        s += <long>x
        v = -x
        Py_INCREF(v)
        PyTuple_SET_ITEM(neg, i, v)
    return (-s, neg)


def divmod_terms(dict g, dict p):
    if not p:
        raise ZeroDivisionError("division by the zero polynomial")
    lead = max(p, key=lambda e: (sum(e), e))
    lc = p[lead]
    cdef list tail_e = [e for e in p if e != lead]
    cdef list tail_c = [p[e] for e in tail_e]
    cdef Py_ssize_t n = len(lead), i, k, nt = len(tail_e)
    cdef long* plead = _pack([lead], n)
    cdef long* ptail = _pack(tail_e, n)
    cdef long* cur = <long*>malloc(max(n, 1) * sizeof(long))
    cdef long* sh = <long*>malloc(max(n, 1) * sizeof(long))
    cdef bint divisible
    cdef dict work = dict(g)
    cdef list heap = [_grlex_key(e) for e in work]
    heap.sort()
    cdef set seen = set(work)
    cdef dict quo = {}, rem = {}
    cdef tuple e, m, shift
    try:
        while heap:
            key = heappop(heap)
            neg = key[1]
            e = tuple([-x for x in neg])
            seen.discard(e)
            c = work.pop(e, None)
            if c is None:
                continue
            divisible = True
            for i in range(n):
                cur[i] = e[i]
                sh[i] = cur[i] - plead[i]
                if sh[i] < 0:
                    divisible = False
            if not divisible:
                rem[e] = c
                continue
            shift = _mk(sh, sh, n, 0)
            t = c / lc
            quo[shift] = t
            for k in range(nt):
                m = _mk(ptail + k * n, sh, n, 1)
                v = work.get(m)
                if v is None:
                    work[m] = -t * tail_c[k]
                    if m not in seen:
                        seen.add(m)
                        heappush(heap, _grlex_key(m))
                else:
                    v = v - t * tail_c[k]
                    if v:
                        work[m] = v
                    else:
                        del work[m]
    finally:
        free(plead)
        free(ptail)
        free(cur)
        free(sh)
    return quo, rem

"""Randomized property checks on monomial maps.

A monomial map ``x -> x^E`` (rows of ``E`` index target coordinates) between
affine spaces sends coordinate hyperplanes to coordinate loci, so every
quantity the library computes has a closed form in the exponent matrix.
Those closed forms are the oracles here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .exactpoly import (
    INF,
    Poly,
    divide,
    exact_divide,
    strip_factor,
    vanishing_order,
)
from .geometry import (
    Atlas,
    Chart,
    ChartMap,
    ContractionPoint,
    DominanceWitness,
    SourceComponent,
    TargetDivisor,
    compose_chart_maps,
    verify_contraction,
    verify_dominance,
)
from .logdiff import (
    RationalSymForm,
    SymLogForm,
    detect_cpair_forms,
    form_order_along,
    local_generators,
    probe_form,
    pullback_form,
    sheaf_membership,
)
from .orbifold import (
    CDivisor,
    CPair,
    MorphismData,
    Verdict,
    check_delta_leq,
    identity_morphism,
    is_cpair_morphism,
    monomial_compose,
    monomial_map,
    orbifold_base,
)


MULTS = (1, 2, 3, 4, INF)
MAX_COUNTEREXAMPLES = 5


def _mj(m):
    return "inf" if m == INF else m


@dataclass
class Tally:
    instances: int = 0
    checked: int = 0
    failures: int = 0
    counterexamples: list = field(default_factory=list)

    def record(self, ok: bool, data) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                self.counterexamples.append(data)

    def as_dict(self) -> dict:
        return {"instances": self.instances, "checked": self.checked,
                "failures": self.failures, "counterexamples": self.counterexamples}


# -- exponent-matrix oracle -----------------------------------------------------


def matrix_rank(M) -> int:
    rows = [[Fraction(x) for x in row] for row in M]
    if not rows or not rows[0]:
        return 0
    rank = 0
    ncols = len(rows[0])
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                k = rows[r][c] / rows[rank][c]
                rows[r] = [a - k * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _spanning_columns(E, i, j):
    """Columns (other than ``i``) whose restriction to rows ``!= j`` is invertible."""
    r, n = len(E), len(E[0])
    others = [c for c in range(n) if c != i]
    rows = [k for k in range(r) if k != j]
    for J in combinations(others, r - 1):
        if matrix_rank([[E[k][c] for c in J] for k in rows]) == r - 1:
            return J
    return None


def column_oracle(E, i):
    """``(dominated divisor index or None, spanning columns)`` for ``{x_i = 0}``.

    The hyperplane lands in the coordinate locus of the rows where column ``i``
    is positive; it dominates a divisor only when that locus is one hyperplane
    and the remaining coordinates still fill it.
    """
    support = [j for j in range(len(E)) if E[j][i] > 0]
    if len(support) != 1:
        return None, None
    J = _spanning_columns(E, i, support[0])
    return (support[0], J) if J is not None else (None, None)


def oracle_multiplicity(Es, j):
    best = INF
    for E in Es:
        for i in range(len(E[0])):
            dom, _ = column_oracle(E, i)
            if dom == j:
                best = min(best, E[j][i])
    return best


def _arc(n, i, J):
    e = len(J)
    arc = []
    for c in range(n):
        if c == i:
            arc.append(Poly.constant(e, 0))
        elif c in J:
            arc.append(Poly.variable(e, J.index(c)))
        else:
            arc.append(Poly.constant(e, 1))
    return tuple(arc)


def _atlas(name, dim, labels):
    return Atlas(name, dim, tuple(Chart(lab, tuple(f"{lab.lower()}_{k}" for k in range(dim)))
                                  for lab in labels))


def monomial_morphism(Es, src="X", tgt="Y", comp_prefix="X", div_prefix="D"):
    """Morphism from a disjoint union of affine charts, one per exponent matrix.

    A bare matrix gives a single chart named ``src``. Hyperplane components
    get certificates read off their own chart's matrix.
    """
    if isinstance(Es[0][0], int):
        Es = [Es]
    r, n = len(Es[0]), len(Es[0][0])
    labels = [src] if len(Es) == 1 else [f"{src}{k + 1}" for k in range(len(Es))]
    source = _atlas(src, n, labels)
    target = _atlas(tgt, r, [tgt])
    maps, comps = [], []
    for lab, E in zip(labels, Es):
        maps.append(monomial_map(E, lab, tgt))
        prefix = comp_prefix if len(Es) == 1 else f"{comp_prefix}{lab[len(src):]}_"
        for i in range(n):
            eq = {lab: Poly.variable(n, i)}
            dom, J = column_oracle(E, i)
            label = f"{prefix}{i}"
            if r == 1:
                comps.append(SourceComponent(label, eq))
            elif dom is not None:
                comps.append(SourceComponent(label, eq, "dominant",
                                             {lab: DominanceWitness(r - 1, _arc(n, i, J), lab, tgt)}))
            elif all(E[j][i] > 0 for j in range(r)):
                origin = ContractionPoint(tgt, (Fraction(0),) * r)
                comps.append(SourceComponent(label, eq, "contracted", {lab: origin}))
            else:
                comps.append(SourceComponent(label, eq, "contracted"))
    divisors = tuple(TargetDivisor(f"{div_prefix}{j}", {tgt: Poly.variable(r, j)}) for j in range(r))
    return MorphismData(source, target, tuple(maps), tuple(comps)), divisors


def random_matrix(rng: random.Random, rows: int, cols: int):
    while True:
        E = [[rng.choice((0, 0, 1, 1, 2, 3, 4)) for _ in range(cols)] for _ in range(rows)]
        if all(any(row) for row in E) and all(any(row[i] for row in E) for i in range(cols)):
            return E


def _times(k, m):
    return INF if m == INF else k * m


def _pick_at_most(rng, bound):
    choices = [m for m in MULTS if m <= bound]
    return rng.choice(choices)


def _divisor(labels, mults) -> CDivisor:
    return CDivisor({lab: m for lab, m in zip(labels, mults) if m != 1})


def _delta_json(delta: CDivisor) -> dict:
    return {k: _mj(m) for k, m in delta.items()}


# -- properties -----------------------------------------------------------------


def _random_source(rng, rows, cols):
    """One matrix per chart; sometimes two charts, i.e. a disjoint union."""
    return [random_matrix(rng, rows, cols) for _ in range(rng.choice((1, 1, 2)))]


def _entries(Es):
    """``(matrix, column)`` for every source component, in component order."""
    return [(E, i) for E in Es for i in range(len(E[0]))]


def prop_base_oracle(rng, count, tally_leq: Tally, tally_oracle: Tally, tally_excl: Tally):
    """Delta_Y <= Delta_f under Yes, the matrix oracle for m(f, D), and
    exclusivity of the two certificate kinds."""
    for _ in range(count):
        n, r = rng.randint(1, 3), rng.randint(1, 3)
        Es = _random_source(rng, r, n)
        f, divs = monomial_morphism(Es)
        base = orbifold_base(f, divs)
        oracle = [oracle_multiplicity(Es, j) for j in range(r)]
        got = [base.multiplicities[d.label] for d in divs]
        for t in (tally_leq, tally_oracle, tally_excl):
            t.instances += 1
        tally_oracle.record(got == oracle, {"E": Es, "expected": [_mj(m) for m in oracle],
                                            "got": [_mj(m) if not isinstance(m, Verdict) else m.value
                                                    for m in got]})
        mults = []
        for j in range(r):
            if rng.random() < 0.5 and oracle[j] != INF:
                mults.append(min(oracle[j], 4) if oracle[j] > 1 else 1)
            else:
                mults.append(rng.choice(MULTS))
        delta_y = _divisor([d.label for d in divs], mults)
        res = is_cpair_morphism(f, CDivisor(), CPair(f.target, delta_y, {d.label: d for d in divs}))
        if res.verdict is Verdict.YES:
            tally_leq.record(check_delta_leq(delta_y, base.divisor),
                             {"E": Es, "deltaY": _delta_json(delta_y), "deltaF": _delta_json(base.divisor)})
        origin = ContractionPoint(f.target.charts[0].label, (Fraction(0),) * r)
        for comp, (E, i) in zip(f.components, _entries(Es)):
            fmap = f.map_from(next(iter(comp.equations)))
            for j, d in enumerate(divs):
                if E[j][i] == 0:
                    continue
                contracted = r >= 2 and verify_contraction(fmap, comp, origin)
                J = _spanning_columns(E, i, j) if r >= 2 else ()
                dominant = J is not None and verify_dominance(
                    fmap, comp, d, DominanceWitness(r - 1, _arc(n, i, J), fmap.source, fmap.target))
                expected = column_oracle(E, i)[0] == j
                tally_excl.record(not (contracted and dominant) and dominant == expected,
                                  {"E": E, "component": i, "divisor": j,
                                   "contracted": contracted, "dominant": dominant})


def prop_composition(rng, count, tally: Tally):
    for _ in range(count):
        tally.instances += 1
        n, r, s = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        Es = _random_source(rng, r, n)
        F = random_matrix(rng, s, r)
        f, ydivs = monomial_morphism(Es, "X", "Y", "X", "Y")
        g, zdivs = monomial_morphism(F, "Y", "Z", "Y", "Z")
        gf, _ = monomial_morphism([monomial_compose(E, F) for E in Es], "X", "Z", "X", "Z")
        cols = _entries(Es)
        mx = [rng.choice((1, 1, 1, 2, 3, INF)) for _ in cols]
        my = []
        for j in range(r):
            bound = min(_times(E[j][i], m) for (E, i), m in zip(cols, mx) if E[j][i])
            my.append(_pick_at_most(rng, bound))
        mz = []
        for k in range(s):
            bound = min(_times(F[k][j], my[j]) for j in range(r) if F[k][j])
            mz.append(_pick_at_most(rng, bound))
        dx = _divisor([c.label for c in f.components], mx)
        dy = _divisor([d.label for d in ydivs], my)
        dz = _divisor([d.label for d in zdivs], mz)
        data = {"E": Es, "F": F, "deltaX": _delta_json(dx), "deltaY": _delta_json(dy),
                "deltaZ": _delta_json(dz)}
        chained = f.then(g)
        if [m.components for m in chained.maps] != [m.components for m in gf.maps]:
            tally.record(False, dict(data, reason="then() disagrees with exponent product"))
            continue
        v1 = is_cpair_morphism(f, dx, CPair(f.target, dy, {d.label: d for d in ydivs})).verdict
        v2 = is_cpair_morphism(g, dy, CPair(g.target, dz, {d.label: d for d in zdivs})).verdict
        if v1 is not Verdict.YES or v2 is not Verdict.YES:
            # the multiplicities were chosen inside the closed-form bounds
            tally.record(False, dict(data, reason=f"constructed pair not Yes: {v1.value}, {v2.value}"))
            continue
        v3 = is_cpair_morphism(gf, dx, CPair(gf.target, dz, {d.label: d for d in zdivs})).verdict
        tally.record(v3 is Verdict.YES, dict(data, composite=v3.value))


def prop_forms_agreement(rng, count, tally: Tally, regular: Tally):
    for _ in range(count):
        tally.instances += 1
        regular.instances += 1
        n, r = rng.randint(1, 3), rng.randint(1, 3)
        Es = _random_source(rng, r, n)
        f, divs = monomial_morphism(Es)
        mults = []
        for j in range(r):
            low = min(E[j][i] for E in Es for i in range(n) if E[j][i])
            mults.append(rng.choice((low, low, low + 1, 1, 2, 3, 4)) if low < 4 else rng.randint(1, 4))
        mults = [min(max(m, 1), 4) for m in mults]
        delta_y = _divisor([d.label for d in divs], mults)
        target = CPair(f.target, delta_y, {d.label: d for d in divs})
        direct = is_cpair_morphism(f, CDivisor(), target).verdict
        forms = detect_cpair_forms(f, target)
        data = {"E": Es, "deltaY": _delta_json(delta_y), "N": forms.N,
                "direct": direct.value, "forms": forms.verdict.value}
        decided = (Verdict.YES, Verdict.NO)
        if direct in decided and forms.verdict in decided:
            tally.record(direct is forms.verdict, data)
        if direct is Verdict.YES:
            degree = rng.randint(1, 2)
            worst = INF
            for gen in local_generators(r, degree, mults):
                for fmap in f.maps:
                    pulled = pullback_form(fmap, gen)
                    for comp in f.components:
                        if fmap.source in comp.equations:
                            worst = min(worst, form_order_along(pulled, comp.equations[fmap.source]))
            regular.record(worst >= 0, dict(data, degree=degree, order=_mj(worst)))


def _random_poly(rng, arity, nterms=3, deg=2):
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randint(0, deg) for _ in range(arity))
        if sum(e) <= deg:
            terms[e] = terms.get(e, 0) + rng.randint(-3, 3)
    return Poly(arity, terms)


def _random_linear(rng, arity):
    while True:
        coeffs = [rng.randint(-2, 2) for _ in range(arity)]
        if any(coeffs):
            break
    terms = {tuple(1 if k == i else 0 for k in range(arity)): c for i, c in enumerate(coeffs)}
    terms[(0,) * arity] = rng.randint(-2, 2)
    return Poly(arity, terms)


def _random_unit(rng, arity, p):
    """A nonzero polynomial not divisible by ``p``."""
    while True:
        u = _random_poly(rng, arity, nterms=2, deg=1)
        if not u.is_zero() and vanishing_order(u, p) == 0:
            return u


def prop_order_law(rng, count, tally: Tally):
    for _ in range(count):
        tally.instances += 1
        d = rng.randint(1, 2)
        p = _random_linear(rng, d)
        u = _random_unit(rng, d, p)
        k = rng.randint(1, 3)
        m = rng.randint(1, 3)
        N = m * rng.randint(1, 2)
        y = u * p ** k
        fmap = ChartMap("X", "Y", (y,))
        q = Poly.variable(1, 0)
        order = form_order_along(pullback_form(fmap, probe_form(q, m, N)), p)
        expected = Fraction(N * k, m) - N
        tally.record(order == expected, {"p": p.to_str(), "u": u.to_str(), "k": k, "m": m, "N": N,
                                         "order": _mj(order), "expected": str(expected)})


def _random_form(rng, arity, degree):
    from .logdiff import multidegrees

    betas = list(multidegrees(arity, degree))
    terms = {}
    for beta in rng.sample(betas, min(len(betas), rng.randint(1, 2))):
        num = _random_poly(rng, arity)
        if num.is_zero():
            num = Poly.constant(arity, 1)
        den = Poly.monomial(tuple(rng.randint(0, 1) for _ in range(arity)))
        if rng.random() < 0.5:
            den = den * (Poly.variable(arity, 0) + 1)
        terms[beta] = (num, den)
    return RationalSymForm(arity, degree, terms)


def prop_functoriality(rng, count, tally: Tally):
    for _ in range(count):
        tally.instances += 1
        a, b, c = rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 2)
        E = random_matrix(rng, b, a)
        F = random_matrix(rng, c, b)
        f = monomial_map(E, "X", "Y", [rng.choice((1, 2, -1)) for _ in range(b)])
        g = monomial_map(F, "Y", "Z", [rng.choice((1, 3, -2)) for _ in range(c)])
        omega = _random_form(rng, c, rng.randint(1, 2))
        lhs = pullback_form(compose_chart_maps(f, g), omega)
        rhs = pullback_form(f, pullback_form(g, omega))
        tally.record(lhs.equivalent(rhs), {"E": E, "F": F, "degree": omega.degree})


def _random_irreducible(rng, arity):
    kind = rng.randrange(3)
    x = Poly.variable(arity, rng.randrange(arity))
    if kind == 0:
        return _random_linear(rng, arity)
    if kind == 1:
        return x ** 2 + rng.randint(1, 3)
    if arity == 1:
        return x ** 2 + x + 1
    return Poly.variable(arity, 0) * Poly.variable(arity, 1) + 1


def prop_exactpoly(rng, count, tally: Tally):
    for _ in range(count):
        tally.instances += 1
        n = rng.randint(1, 3)
        p = _random_irreducible(rng, n)
        g = _random_poly(rng, n) * p ** rng.randint(0, 2)
        h = _random_poly(rng, n) * p ** rng.randint(0, 2)
        ok = True
        if not g.is_zero() and not h.is_zero():
            ok &= vanishing_order(g * h, p) == vanishing_order(g, p) + vanishing_order(h, p)
            k, rest = strip_factor(g, p)
            ok &= k == vanishing_order(g, p) and rest * p ** k == g
        q, rem = divide(g, p)
        ok &= q * p + rem == g
        ok &= exact_divide(h * p, p) == h
        tally.record(ok, {"p": p.to_str(), "g": g.to_str(), "h": h.to_str()})


def prop_generators(rng, count, membership: Tally, identity: Tally):
    for _ in range(count):
        membership.instances += 1
        identity.instances += 1
        d, n = rng.randint(1, 3), rng.randint(1, 3)
        mults = [rng.choice(MULTS) for _ in range(d)]
        ok = True
        for gen in local_generators(d, n, mults):
            ok &= sheaf_membership(gen)[0]
            ((alpha, v), c), = gen.terms.items()
            for k, m in enumerate(mults):
                if m != 1 and alpha[k] >= 1:
                    lowered = tuple(a - 1 if i == k else a for i, a in enumerate(alpha))
                    ok &= not sheaf_membership(SymLogForm(d, n, mults, {(lowered, v): c}))[0]
        membership.record(ok, {"d": d, "n": n, "mults": [_mj(m) for m in mults]})
        eye = [[int(i == k) for i in range(d)] for k in range(d)]
        f, divs = monomial_morphism(eye, "X", "X", "H", "H")
        same = f.maps[0].components == identity_morphism(f.source).maps[0].components
        base = orbifold_base(f, divs)
        identity.record(same and base.divisor.is_empty() and not base.undetermined, {"d": d})


def fuzz_monomial(seed: int = 0, count: int = 200) -> dict:
    """Run every property ``count`` times from ``seed``; returns name -> summary."""
    if count < 1:
        raise ValueError("count must be at least 1")
    names = ["delta-leq-base", "base-matrix-oracle", "certificate-exclusivity", "composition",
             "forms-agreement", "generator-regularity", "order-law", "functoriality",
             "exactpoly-valuation", "generator-membership", "identity-base"]
    t = {name: Tally() for name in names}

    def stream(name):
        return random.Random(f"{seed}:{name}")

    prop_base_oracle(stream("base"), count, t["delta-leq-base"], t["base-matrix-oracle"],
                     t["certificate-exclusivity"])
    prop_composition(stream("composition"), count, t["composition"])
    prop_forms_agreement(stream("forms"), count, t["forms-agreement"], t["generator-regularity"])
    prop_order_law(stream("order"), count, t["order-law"])
    prop_functoriality(stream("functoriality"), count, t["functoriality"])
    prop_exactpoly(stream("exactpoly"), count, t["exactpoly-valuation"])
    prop_generators(stream("generators"), count, t["generator-membership"], t["identity-base"])
    return {name: tally.as_dict() for name, tally in t.items()}


run_properties = fuzz_monomial

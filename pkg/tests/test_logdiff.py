from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbicheck.exactpoly import INF, Poly, parse_poly, variables
from orbicheck.geometry import ChartMap, compose_chart_maps
from orbicheck.logdiff import (
    PullbackUndefined,
    RationalSymForm,
    SymLogForm,
    ceil_ratio,
    default_N,
    detect_cpair_forms,
    form_order_along,
    local_generators,
    multidegrees,
    probe_form,
    pullback_form,
    sheaf_membership,
)
from orbicheck.orbifold import CDivisor, CPair, Verdict
from orbicheck.scenario import load_fixture

a, m = variables(2)
t = Poly.variable(1, 0)
ONE2 = Poly.constant(2, 1)
BLOWUP = ChartMap("A", "T", (a, a * m ** 2))


def test_multidegrees_and_ceil():
    assert list(multidegrees(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert ceil_ratio(3, 2) == 2 and ceil_ratio(4, 2) == 2 and ceil_ratio(5, INF) == 0


def test_sheaf_membership_examples():
    assert sheaf_membership(SymLogForm(1, 2, (2,), {((1,), (2,)): 1})) == (True, None)
    ok, bad = sheaf_membership(SymLogForm(1, 2, (2,), {((0,), (2,)): 1}))
    assert not ok and bad == ((0,), (2,))
    assert sheaf_membership(SymLogForm(1, 3, (INF,), {((0,), (3,)): 1}))[0]


def test_symlogform_validation():
    with pytest.raises(ValueError):
        SymLogForm(1, 2, (2,), {((1,), (1,)): 1})
    with pytest.raises(ValueError):
        SymLogForm(2, 1, (2,), {})


def test_local_generators_examples():
    (g,) = local_generators(1, 2, [2])
    assert g.terms == {((1,), (2,)): 1}
    gens = local_generators(2, 1, [2, 1])
    assert [tuple(g.terms) for g in gens] == [(((1, 0), (1, 0)),), (((0, 0), (0, 1)),)]
    plain = local_generators(3, 1, [1, 1, 1])
    assert all(alpha == (0, 0, 0) for g in plain for (alpha, _) in g.terms)
    with pytest.raises(ValueError):
        local_generators(0, 1, [])


def test_generator_to_rational_plain_basis():
    (g,) = local_generators(1, 2, [2])
    r = g.to_rational()
    ((beta, (num, den)),) = r.terms.items()
    assert beta == (2,) and num == Poly.constant(1, 1) and den == t


def test_generators_in_sheaf_and_minimal():
    for mults in ([2, 3], [INF, 2], [4, 1]):
        for g in local_generators(2, 3, mults):
            assert sheaf_membership(g)[0]
            ((alpha, v), c), = g.terms.items()
            for k, mk in enumerate(mults):
                if mk != 1 and alpha[k] >= 1:
                    lower = tuple(x - (i == k) for i, x in enumerate(alpha))
                    assert not sheaf_membership(SymLogForm(2, 3, mults, {(lower, v): c}))[0]


def test_pullback_identity():
    omega = RationalSymForm(2, 1, {(1, 0): (m, a), (0, 1): (ONE2, ONE2)})
    assert pullback_form(ChartMap("T", "T", (a, m)), omega).equivalent(omega)


def test_pullback_square_map():
    dy_over_y = RationalSymForm(1, 1, {(1,): (Poly.constant(1, 1), t)})
    pulled = pullback_form(ChartMap("C", "C", (t ** 2,)), dy_over_y)
    ((beta, (num, den)),) = pulled.terms.items()
    assert beta == (1,) and num == 2 * t and den == t ** 2
    assert form_order_along(pulled, t) == -1


def test_pullback_blowup_dv2_over_v():
    v = Poly.variable(2, 1)
    omega = probe_form(v, 2, 2)
    pulled = pullback_form(BLOWUP, omega)
    nums = {beta: num for beta, (num, den) in pulled.terms.items()}
    assert nums[(2, 0)] == m ** 4
    assert nums[(1, 1)] == 4 * a * m ** 3
    assert nums[(0, 2)] == 4 * a ** 2 * m ** 2
    assert all(den == a * m ** 2 for _, den in pulled.terms.values())
    assert form_order_along(pulled, m) == 0
    assert form_order_along(pulled, a) == -1


def test_pullback_undefined():
    omega = RationalSymForm(2, 1, {(1, 0): (ONE2, a)})
    with pytest.raises(PullbackUndefined):
        pullback_form(ChartMap("S", "T", (Poly.constant(2, 0), m)), omega)
    with pytest.raises(ValueError):
        pullback_form(ChartMap("S", "T", (a,)), omega)


def test_order_of_polynomial_form_nonnegative():
    omega = RationalSymForm.polynomial(2, 1, {(1, 0): a * m, (0, 1): m + 1})
    assert form_order_along(omega, a) >= 0 and form_order_along(omega, a + m) >= 0
    with pytest.raises(ValueError):
        form_order_along(omega, ONE2)


def test_form_arithmetic():
    x = RationalSymForm.differential(a)
    y = RationalSymForm.differential(m)
    s = x + y
    assert set(s.terms) == {(1, 0), (0, 1)}
    assert (x * y).degree == 2 and (x * y).terms[(1, 1)][0] == ONE2
    assert x.power(0).degree == 0 and x.power(3).terms[(3, 0)][0] == ONE2
    assert (x + x.scale(Poly.constant(2, -1))).is_zero()
    with pytest.raises(ValueError):
        x + x.power(2)
    with pytest.raises(ZeroDivisionError):
        RationalSymForm(2, 1, {(1, 0): (ONE2, Poly.constant(2, 0))})


def test_probe_form_requires_multiple():
    with pytest.raises(ValueError):
        probe_form(a, 2, 3)
    assert probe_form(a, INF, 1).terms[(1, 0)][1] == a


@pytest.mark.parametrize("k,m_,N", [(1, 2, 2), (2, 2, 2), (3, 2, 4), (1, 3, 3), (2, 1, 2)])
def test_local_model_order(k, m_, N):
    y = ChartMap("C", "D", (t ** k,))
    order = form_order_along(pullback_form(y, probe_form(Poly.variable(1, 0), m_, N)), t)
    assert order == Fraction(N * k, m_) - N


@settings(max_examples=25, deadline=None)
@given(k=st.integers(1, 3), m_=st.integers(1, 3), c=st.integers(1, 2),
       shift=st.integers(-2, 2), slope=st.integers(1, 3))
def test_order_law_with_unit(k, m_, c, shift, slope):
    p = a + slope * m + shift
    u = m + 5  # free of a, so p does not divide it
    N = m_ * c
    fmap = ChartMap("S", "Y", (u * p ** k,))
    order = form_order_along(pullback_form(fmap, probe_form(Poly.variable(1, 0), m_, N)), p)
    assert order == Fraction(N * k, m_) - N


@settings(max_examples=25, deadline=None)
@given(E=st.lists(st.integers(0, 3), min_size=2, max_size=2),
       F=st.lists(st.integers(0, 3), min_size=2, max_size=2), deg=st.integers(1, 2))
def test_functoriality(E, F, deg):
    if not any(E) or not any(F):
        return
    f = ChartMap("X", "Y", (t ** E[0], t ** E[1] + 1))
    g = ChartMap("Y", "Z", (a ** F[0] * m + 1, m ** F[1] + a))
    omega = RationalSymForm(2, deg, {(deg, 0): (a + m, m + 2), (0, deg): (ONE2, ONE2)})
    lhs = pullback_form(compose_chart_maps(f, g), omega)
    rhs = pullback_form(f, pullback_form(g, omega))
    assert lhs.equivalent(rhs)


# -- forms oracle -------------------------------------------------------------------


def _target(scn, boundary):
    return CPair(scn.target, boundary, {d.label: d for d in scn.divisors})


def test_forms_oracle_surface():
    scn = load_fixture("surface")
    res = detect_cpair_forms(scn.morphism, _target(scn, CDivisor({"U0": 2, "V0": 2})), N=2)
    assert res.verdict is Verdict.NO and res.N == 2
    assert res.witness.component == "E" and res.witness.order == -1
    by = {(r.divisor, r.chart, r.component): r.order for r in res.records}
    assert by[("U0", "B", "E")] == -1 and by[("U0", "B", "N")] == 0


def test_forms_oracle_flat_control():
    scn = load_fixture("flat-control")
    res = detect_cpair_forms(scn.morphism, _target(scn, CDivisor({"U0": 2})), N=2)
    assert res.verdict is Verdict.YES
    assert detect_cpair_forms(scn.morphism, _target(scn, CDivisor({"U0": 2})), N=4).verdict is Verdict.YES


def test_forms_oracle_N_checks():
    scn = load_fixture("surface")
    with pytest.raises(ValueError, match="multiple"):
        detect_cpair_forms(scn.morphism, _target(scn, CDivisor({"U0": 2})), N=3)
    with pytest.raises(ValueError):
        detect_cpair_forms(scn.morphism, _target(scn, CDivisor({"U0": 2})), N=0)
    assert default_N(CDivisor({"U0": 2, "V0": 3, "W": INF})) == 6
    assert default_N(CDivisor()) == 1


def test_forms_oracle_partial_for_floor():
    scn = load_fixture("surface")
    res = detect_cpair_forms(scn.morphism, _target(scn, CDivisor({"U0": INF})),
                             components=[c for c in scn.components if c.label == "M"])
    assert res.verdict is Verdict.PARTIAL
    assert any("floor" in n for n in res.notes)


def test_forms_oracle_factors_through():
    scn = load_fixture("flat-control")
    names = ["x", "y"]
    fmap = ChartMap("S", "T", (parse_poly("0", names), parse_poly("y", names)))
    f = type(scn.morphism)(scn.source, scn.target, (fmap,), scn.morphism.components)
    res = detect_cpair_forms(f, _target(scn, CDivisor({"U0": 2})))
    assert res.verdict is Verdict.FACTORS_THROUGH

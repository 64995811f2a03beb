import pytest

from orbicheck.exactpoly import INF, Poly
from orbicheck.geometry import ContractionPoint, DominanceWitness
from orbicheck.orbifold import orbifold_base
from orbicheck.scenario import (
    ArityMismatch,
    ScenarioSyntaxError,
    UnresolvedLabel,
    fixture_names,
    load_fixture,
    parse_scenario,
)

BASE = """\
[atlas source] name=X dim=2
chart S: x,y

[atlas target] name=Y dim=2
chart T: u,v

[map]
S -> T: x^2; y
"""


def scn(extra=""):
    return parse_scenario(BASE + extra, "test.scn")


def test_bundled_fixtures():
    assert set(fixture_names()) >= {"surface", "threefold", "flat-control", "affine-blowup"}
    for name in fixture_names():
        assert load_fixture(name).warnings == []
    with pytest.raises(FileNotFoundError):
        load_fixture("nope")


def test_surface_fixture_shape():
    s = load_fixture("surface")
    assert s.name == "surface"
    assert len(s.source.charts) == 2 and len(s.morphism.maps) == 2
    assert [d.label for d in s.divisors] == ["U0", "V0"]
    assert s.component_lines == 4
    assert [c.label for c in s.components] == ["E", "M", "N"]
    E = s.components[0]
    assert set(E.equations) == {"A", "B"} and E.declared == "contracted"
    assert all(isinstance(c, ContractionPoint) for c in E.certificates.values())
    assert isinstance(s.components[1].certificates["A"], DominanceWitness)
    assert dict(s.target_pair.items()) == {"U0": 2, "V0": 2}
    assert set(s.stages) == {"pr1"} and s.morphism.neat is False
    assert len(s.expectations) == 7


def test_threefold_fixture_has_dummy_coordinate():
    s = load_fixture("threefold")
    assert s.source.dimension == 3 and s.target.dimension == 2


def test_minimal_scenario_without_divisors():
    s = scn()
    assert s.divisors == () and s.components == ()
    assert s.source_pair is None and s.target_pair is None
    assert orbifold_base(s.morphism, s.divisors).divisor.is_empty()
    assert s.name == "test"


def test_full_sections():
    s = scn("""
[divisor target]
U0 @ T: u

[component]
X0 @ S: x status=dominant arc=(0,t) params=1
Y0 @ S: y

[pair source]
Y0 mult=inf

[pair target]
U0 mult=2

[expect]
orbibase U0=2
check=yes
""")
    assert s.source_pair.get("Y0") == INF
    assert s.components[1].declared is None
    assert s.components[0].certificates["S"].arc == (Poly.constant(1, 0), Poly.variable(1, 0))
    assert [e.describe() for e in s.expectations] == ["orbibase U0=2", "check=yes"]


def test_comments_and_blank_lines():
    s = parse_scenario("# header\n\n" + BASE.replace("[map]", "[map]  # the map"), "c.scn")
    assert len(s.morphism.maps) == 1


def test_implicit_multiplication_is_a_parse_error():
    with pytest.raises(ScenarioSyntaxError) as info:
        parse_scenario(BASE.replace("x^2; y", "x y; y"), "bad.scn")
    err = info.value
    assert err.line == 8 and err.column > 0
    assert "implicit multiplication" in str(err) and "bad.scn:8:" in str(err)


def test_unknown_section():
    with pytest.raises(ScenarioSyntaxError) as info:
        scn("[bogus]\n")
    assert info.value.line == 9 and info.value.column == 1


def test_unresolved_labels():
    with pytest.raises(UnresolvedLabel):
        scn("[divisor target]\nU0 @ Q: u\n")
    with pytest.raises(UnresolvedLabel):
        scn("[divisor target]\nU0 @ T: u\n[pair target]\nW mult=2\n")
    with pytest.raises(UnresolvedLabel):
        scn("[divisor target]\nU0 @ T: u\n[expect]\norbibase W=2\n")
    with pytest.raises(UnresolvedLabel):
        scn("[expect]\ncompose-with=pr9 orbibase-trivial\n")
    with pytest.raises(UnresolvedLabel):
        scn("[divisor target]\nU0 @ T: w\n")


def test_arity_mismatches():
    with pytest.raises(ArityMismatch):
        parse_scenario(BASE.replace("x^2; y", "x^2"), "a.scn")
    with pytest.raises(ArityMismatch):
        scn("[component]\nX0 @ S: x status=contracted point=(0)\n")
    with pytest.raises(ArityMismatch):
        scn("[component]\nX0 @ S: x status=dominant arc=(0,t) params=2\n")
    with pytest.raises(ArityMismatch):
        parse_scenario(BASE.replace("chart S: x,y", "chart S: x,y,z"), "a.scn")


def test_component_option_errors():
    with pytest.raises(ScenarioSyntaxError):
        scn("[component]\nX0 @ S: x status=sideways\n")
    with pytest.raises(ScenarioSyntaxError):
        scn("[component]\nX0 @ S: x point=(0,0)\n")
    with pytest.raises(ScenarioSyntaxError):
        scn("[component]\nX0 @ S: x status=dominant arc=(0,t)\n")
    with pytest.raises(ScenarioSyntaxError):
        scn("[component]\nX0 @ S: x colour=red\n")


def test_bad_multiplicity():
    with pytest.raises(ScenarioSyntaxError):
        scn("[divisor target]\nU0 @ T: u\n[pair target]\nU0 mult=0\n")


def test_missing_map_section():
    with pytest.raises(ScenarioSyntaxError):
        parse_scenario(BASE.split("[map]")[0], "m.scn")


def test_sanity_warnings():
    s = scn("[component]\nX0 @ S: x^2\nX1 @ S: 2*x\n")
    assert any("not square-free" in w for w in s.warnings)

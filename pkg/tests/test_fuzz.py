import random

import pytest

from orbicheck.exactpoly import INF
from orbicheck.fuzz import (
    Tally,
    column_oracle,
    fuzz_monomial,
    matrix_rank,
    monomial_morphism,
    oracle_multiplicity,
    random_matrix,
)
from orbicheck.orbifold import orbifold_base


def test_matrix_rank():
    assert matrix_rank([[1, 2], [2, 4]]) == 1
    assert matrix_rank([[1, 0], [1, 2]]) == 2
    assert matrix_rank([[0, 0]]) == 0
    assert matrix_rank([]) == 0


def test_column_oracle_on_blowup_charts():
    # (a, m) -> (a, a m^2): {a=0} is contracted, {m=0} dominates the second axis
    E = [[1, 0], [1, 2]]
    assert column_oracle(E, 0) == (None, None)
    assert column_oracle(E, 1) == (1, (0,))
    assert oracle_multiplicity([E], 1) == 2
    assert oracle_multiplicity([E], 0) == INF
    # both charts of the blow-up together
    F = [[1, 2], [1, 0]]
    assert [oracle_multiplicity([E, F], j) for j in (0, 1)] == [2, 2]


def test_column_oracle_needs_spanning_columns():
    # x -> (x^2, y, y): {x=0} lands in a line, not a divisor of the 3-space
    E = [[2, 0], [0, 1], [0, 1]]
    assert column_oracle(E, 0) == (None, None)


def test_monomial_morphism_matches_oracle():
    rng = random.Random(3)
    for _ in range(30):
        r, n = rng.randint(1, 3), rng.randint(1, 3)
        Es = [random_matrix(rng, r, n) for _ in range(rng.randint(1, 2))]
        f, divs = monomial_morphism(Es)
        base = orbifold_base(f, divs)
        for j, d in enumerate(divs):
            assert base.multiplicities[d.label] == oracle_multiplicity(Es, j)


def test_two_chart_labels():
    f, divs = monomial_morphism([[[1, 0], [1, 2]], [[1, 2], [1, 0]]])
    assert [c.label for c in f.source.charts] == ["X1", "X2"]
    assert [c.label for c in f.components] == ["X1_0", "X1_1", "X2_0", "X2_1"]
    assert [d.label for d in divs] == ["D0", "D1"]


def test_random_matrix_has_no_zero_lines():
    rng = random.Random(0)
    for _ in range(50):
        E = random_matrix(rng, 3, 2)
        assert all(any(row) for row in E)
        assert all(any(row[i] for row in E) for i in range(2))


def test_tally_caps_counterexamples():
    t = Tally()
    for k in range(8):
        t.record(False, k)
    t.record(True, None)
    assert t.as_dict() == {"instances": 0, "checked": 9, "failures": 8, "counterexamples": [0, 1, 2, 3, 4]}


def test_fuzz_is_deterministic_and_green():
    first = fuzz_monomial(seed=11, count=10)
    assert fuzz_monomial(seed=11, count=10) == first
    assert len(first) == 11
    assert all(p["failures"] == 0 for p in first.values())
    assert all(p["instances"] == 10 for p in first.values())
    assert all(p["checked"] > 0 for p in first.values())


def test_fuzz_count_validation():
    with pytest.raises(ValueError):
        fuzz_monomial(count=0)
    assert all(p["instances"] == 1 for p in fuzz_monomial(seed=2, count=1).values())

"""Multiplicities, orbifold base divisors and the C-pair morphism predicate.

Multiplicities are positive integers or ``INF``. A C-pair boundary assigns the
coefficient ``1 - 1/m`` to each of its labels, with ``1/INF = 0``.

The orbifold base multiplicity ``m(f, D)`` of a target divisor is the minimum
pullback coefficient over the source components that dominate ``D``; it is
``INF`` if no component dominates ``D``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .exactpoly import INF, Poly
from .geometry import (
    Atlas,
    ChartMap,
    Classification,
    DominanceWitness,
    GeometryError,
    PullbackDecomposition,
    SourceComponent,
    TargetDivisor,
    classify_in_chart,
    compose_chart_maps,
    pullback_decompose,
)

Multiplicity = Union[int, float]


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    FACTORS_THROUGH = "factors"
    UNDETERMINED = "undetermined"
    PARTIAL = "partial"

    def __str__(self):
        return self.value


def check_multiplicity(m) -> Multiplicity:
    if m == INF:
        return INF
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValueError(f"multiplicity must be a positive integer or infinity, got {m!r}")
    return m


def format_multiplicity(m) -> str:
    if isinstance(m, Verdict):
        return m.value
    return "inf" if m == INF else str(m)


def mult_to_coeff(m: Multiplicity) -> Fraction:
    m = check_multiplicity(m)
    if m == INF:
        return Fraction(1)
    return 1 - Fraction(1, m)


@dataclass(frozen=True)
class CDivisor:
    """Boundary divisor of a C-pair as ``label -> multiplicity``.

    Labels with multiplicity one carry coefficient zero and are not stored.
    """

    entries: Mapping[str, Multiplicity] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for label, m in dict(self.entries).items():
            m = check_multiplicity(m)
            if m != 1:
                clean[label] = m
        object.__setattr__(self, "entries", clean)

    def get(self, label: str) -> Multiplicity:
        return self.entries.get(label, 1)

    def coefficient(self, label: str) -> Fraction:
        return mult_to_coeff(self.get(label))

    def items(self):
        return self.entries.items()

    def labels(self) -> list[str]:
        return list(self.entries)

    def floor(self) -> list[str]:
        return [label for label, m in self.entries.items() if m == INF]

    def is_empty(self) -> bool:
        return not self.entries

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        if not self.entries:
            return "0"
        return " + ".join(f"({self.coefficient(k)}){k}" for k in self.entries)


@dataclass(frozen=True)
class CPair:
    atlas: Atlas
    boundary: CDivisor
    geometry: Mapping[str, TargetDivisor]
    snc: bool = False

    def __post_init__(self):
        missing = [label for label in self.boundary.labels() if label not in self.geometry]
        if missing:
            raise GeometryError(f"boundary labels without geometry: {missing}")


@dataclass(frozen=True)
class MorphismData:
    source: Atlas
    target: Atlas
    maps: tuple[ChartMap, ...]
    components: tuple[SourceComponent, ...] = ()
    neat: bool | None = None

    def __post_init__(self):
        seen = set()
        for fmap in self.maps:
            if not self.source.has_chart(fmap.source):
                raise GeometryError(f"map source chart {fmap.source} not in atlas {self.source.name}")
            if not self.target.has_chart(fmap.target):
                raise GeometryError(f"map target chart {fmap.target} not in atlas {self.target.name}")
            if fmap.source in seen:
                raise GeometryError(f"two maps from chart {fmap.source}")
            seen.add(fmap.source)
            if fmap.source_dim != self.source.dimension:
                raise GeometryError(f"map from {fmap.source}: components use {fmap.source_dim} "
                                    f"variables, source has dimension {self.source.dimension}")
            if fmap.target_dim != self.target.dimension:
                raise GeometryError(f"map from {fmap.source}: {fmap.target_dim} components, "
                                    f"target has dimension {self.target.dimension}")

    def map_from(self, chart: str) -> ChartMap:
        for fmap in self.maps:
            if fmap.source == chart:
                return fmap
        raise KeyError(chart)

    def classify(self, fmap: ChartMap, comp: SourceComponent, divisor: TargetDivisor) -> Classification:
        if fmap.source not in comp.certificates:
            # reuse a certificate stated in another chart (components are identified by label)
            for chart, cert in comp.certificates.items():
                try:
                    other = self.map_from(chart)
                except KeyError:
                    continue
                if isinstance(cert, DominanceWitness) and other.target not in divisor.equations:
                    continue
                return classify_in_chart(other, comp, divisor)
        return classify_in_chart(fmap, comp, divisor)

    def decompose(self, divisor: TargetDivisor, charts: Iterable[str] | None = None) -> PullbackDecomposition:
        wanted = None if charts is None else set(charts)
        parts = []
        for fmap in self.maps:
            if wanted is not None and fmap.source not in wanted:
                continue
            if fmap.target not in divisor.equations:
                continue
            parts.append(pullback_decompose(
                fmap, divisor, self.components,
                classify=lambda c, fmap=fmap: self.classify(fmap, c, divisor)))
        return PullbackDecomposition(divisor.label, tuple(parts))

    def then(self, second: "MorphismData") -> "MorphismData":
        """The composite ``second o self``.

        Component certificates describe ``self`` only, so the composite keeps
        the component equations and drops their statuses.
        """
        maps = []
        for fmap in self.maps:
            maps.append(compose_chart_maps(fmap, second.map_from(fmap.target)))
        comps = tuple(SourceComponent(c.label, c.equations) for c in self.components)
        return MorphismData(self.source, second.target, tuple(maps), comps)


def identity_morphism(atlas: Atlas, components: Sequence[SourceComponent] = ()) -> MorphismData:
    maps = []
    for chart in atlas.charts:
        d = chart.dimension
        maps.append(ChartMap(chart.label, chart.label, tuple(Poly.variable(d, i) for i in range(d))))
    return MorphismData(atlas, atlas, tuple(maps), tuple(components))


# -- multiplicities ----------------------------------------------------------------


def divisor_multiplicity(decomps: Sequence[PullbackDecomposition] | PullbackDecomposition):
    """``m(f, D)`` from the chart decompositions of one divisor.

    Returns a multiplicity, ``Verdict.FACTORS_THROUGH`` when the pullback
    vanishes identically in every chart, or ``Verdict.UNDETERMINED``.
    """
    if isinstance(decomps, PullbackDecomposition):
        decomps = [decomps]
    labels = {d.divisor for d in decomps}
    if len(labels) > 1:
        raise ValueError(f"decompositions of different divisors: {sorted(labels)}")
    charts = [c for d in decomps for c in d.charts]
    if not charts:
        return INF
    if all(c.factors_through for c in charts):
        return Verdict.FACTORS_THROUGH
    if any(not c.complete for c in charts):
        return Verdict.UNDETERMINED
    entries = [e for c in charts for e in c.entries]
    best = min((e.coefficient for e in entries if e.dominant), default=INF)
    # an unclassified component only matters if it could lower the minimum
    if any(e.dominant is None and e.coefficient < best for e in entries):
        return Verdict.UNDETERMINED
    return best


@dataclass(frozen=True)
class OrbifoldBase:
    divisor: CDivisor
    multiplicities: Mapping[str, object]
    decompositions: Mapping[str, PullbackDecomposition]

    @property
    def undetermined(self) -> list[str]:
        return [k for k, m in self.multiplicities.items() if m is Verdict.UNDETERMINED]


def orbifold_base(f: MorphismData, divisors: Sequence[TargetDivisor]) -> OrbifoldBase:
    """Orbifold base divisor of ``f`` over the listed target divisors.

    Unlisted prime divisors are taken to have multiplicity one.
    """
    mults = {}
    decomps = {}
    entries = {}
    for D in divisors:
        dec = f.decompose(D)
        decomps[D.label] = dec
        m = divisor_multiplicity(dec)
        mults[D.label] = m
        if not isinstance(m, Verdict) and m != 1:
            entries[D.label] = m
    return OrbifoldBase(CDivisor(entries), mults, decomps)


def check_delta_leq(delta_y: CDivisor, delta_f: CDivisor) -> bool:
    return all(delta_y.coefficient(k) <= delta_f.coefficient(k) for k in delta_y.labels())


# -- the predicate ---------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    divisor: str
    component: str
    chart: str
    coefficient: int
    required: object

    def __str__(self):
        req = "inf" if self.required == INF else str(self.required)
        return (f"{self.component} @ {self.chart} has coefficient {self.coefficient} in the pullback "
                f"of {self.divisor}, required {req}")


@dataclass(frozen=True)
class DivisorCheck:
    divisor: str
    multiplicity: Multiplicity
    outcome: Verdict
    decomposition: PullbackDecomposition
    witness: Witness | None = None
    note: str = ""


@dataclass(frozen=True)
class PredicateResult:
    verdict: Verdict
    checks: tuple[DivisorCheck, ...]
    witness: Witness | None = None


def is_cpair_morphism(f: MorphismData, delta_x: CDivisor, target: CPair) -> PredicateResult:
    """Decide whether ``f`` is a C-pair morphism ``(X, delta_x) -> target``.

    For a boundary divisor of multiplicity ``m'`` every component of its
    pullback needs coefficient at least ``m'/m`` when the component has
    multiplicity ``m`` in ``delta_x`` (``m'`` otherwise). For ``m' = INF``
    every such component must itself have multiplicity ``INF``; this checks
    the floor condition in codimension one only.
    """
    checks = []
    for label, m_target in target.boundary.items():
        decomp = f.decompose(target.geometry[label])
        note = _floor_note(m_target)
        if decomp.factors_through:
            checks.append(DivisorCheck(label, m_target, Verdict.FACTORS_THROUGH, decomp,
                                       note="f factors through this divisor"))
            continue
        if not decomp.complete:
            checks.append(DivisorCheck(label, m_target, Verdict.UNDETERMINED, decomp,
                                       note="incomplete decomposition"))
            continue
        failure = None
        for part in decomp.charts:
            for entry in part.entries:
                m_source = delta_x.get(entry.component)
                if m_target == INF:
                    if m_source != INF:
                        failure = Witness(label, entry.component, part.chart, entry.coefficient, INF)
                else:
                    bound = Fraction(0) if m_source == INF else Fraction(m_target, m_source)
                    if entry.coefficient < bound:
                        failure = Witness(label, entry.component, part.chart, entry.coefficient, bound)
                if failure is not None:
                    break
            if failure is not None:
                break
        outcome = Verdict.YES if failure is None else Verdict.NO
        checks.append(DivisorCheck(label, m_target, outcome, decomp, failure, note))
    return PredicateResult(_combine([c.outcome for c in checks]), tuple(checks),
                           next((c.witness for c in checks if c.witness), None))


def _floor_note(m) -> str:
    return "floor checked in codimension one" if m == INF else ""


def _combine(outcomes: Sequence[Verdict]) -> Verdict:
    for v in (Verdict.NO, Verdict.UNDETERMINED, Verdict.PARTIAL, Verdict.FACTORS_THROUGH):
        if v in outcomes:
            return v
    return Verdict.YES


# -- monomial maps -----------------------------------------------------------------


def _check_matrix(M: Sequence[Sequence[int]], name: str) -> tuple[int, int]:
    if not M or not M[0]:
        raise ValueError(f"{name} is empty")
    cols = len(M[0])
    for row in M:
        if len(row) != cols:
            raise ValueError(f"{name} is ragged")
        if any((not isinstance(x, int)) or x < 0 for x in row):
            raise ValueError(f"{name} must have non-negative integer entries")
    return len(M), cols


def monomial_compose(E: Sequence[Sequence[int]], F: Sequence[Sequence[int]]) -> list[list[int]]:
    """Exponent matrix of ``g o f`` for monomial maps with matrices ``E`` (of f)
    and ``F`` (of g). Rows index target coordinates, columns source variables."""
    rE, cE = _check_matrix(E, "E")
    rF, cF = _check_matrix(F, "F")
    if cF != rE:
        raise ValueError(f"shape mismatch: F has {cF} columns, E has {rE} rows")
    return [[sum(F[k][j] * E[j][i] for j in range(rE)) for i in range(cE)] for k in range(rF)]


def monomial_map(E: Sequence[Sequence[int]], source: str, target: str,
                 coefficients: Sequence | None = None) -> ChartMap:
    rows, cols = _check_matrix(E, "E")
    comps = []
    for k, row in enumerate(E):
        c = 1 if coefficients is None else coefficients[k]
        comps.append(Poly.monomial(tuple(row), c))
    return ChartMap(source, target, tuple(comps))

"""Chart-level models of varieties, morphisms and divisors.

A smooth variety is presented by an :class:`Atlas` of affine charts, a morphism
by one :class:`ChartMap` per source chart, and prime divisors by their local
equations. The central computation is the decomposition of a pulled-back
divisor, ``f^*D = sum a_i D_i + R``, where the ``D_i`` dominate ``D`` and the
components of ``R`` are contracted to codimension at least two.

Component discovery is declarative: the caller lists candidate components and
the decomposition certifies their orders and whether anything is left over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Mapping, Sequence

from .exactpoly import (
    NotDivisible,
    Poly,
    divide,
    exact_divide,
    looks_squarefree,
    partial_derivative,
    strip_factor,
    substitute,
)


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    label: str
    variables: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.variables)


@dataclass(frozen=True)
class Atlas:
    name: str
    dimension: int
    charts: tuple[Chart, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise GeometryError(f"atlas {self.name}: dimension must be positive")
        labels = [c.label for c in self.charts]
        if len(set(labels)) != len(labels):
            raise GeometryError(f"atlas {self.name}: duplicate chart labels")
        for c in self.charts:
            if c.dimension != self.dimension:
                raise GeometryError(
                    f"atlas {self.name}: chart {c.label} has {c.dimension} variables, "
                    f"expected {self.dimension}"
                )

    def chart(self, label: str) -> Chart:
        for c in self.charts:
            if c.label == label:
                return c
        raise KeyError(label)

    def has_chart(self, label: str) -> bool:
        return any(c.label == label for c in self.charts)


@dataclass(frozen=True)
class ChartMap:
    source: str
    target: str
    components: tuple[Poly, ...]

    def __post_init__(self):
        if not self.components:
            raise GeometryError("a chart map needs at least one component")
        arity = self.components[0].arity
        if any(c.arity != arity for c in self.components):
            raise GeometryError(f"chart map {self.source}->{self.target}: mixed arities")
        if all(c.is_constant() for c in self.components):
            raise GeometryError(f"chart map {self.source}->{self.target} is constant")

    @property
    def source_dim(self) -> int:
        return self.components[0].arity

    @property
    def target_dim(self) -> int:
        return len(self.components)

    def pull(self, g: Poly) -> Poly:
        return substitute(g, self.components)


def compose_chart_maps(first: ChartMap, second: ChartMap) -> ChartMap:
    """``second o first``; the target chart of ``first`` must be the source of ``second``."""
    if first.target != second.source:
        raise GeometryError(f"cannot compose {first.source}->{first.target} with "
                            f"{second.source}->{second.target}")
    return ChartMap(first.source, second.target,
                    tuple(first.pull(c) for c in second.components))


@dataclass(frozen=True)
class TargetDivisor:
    label: str
    equations: Mapping[str, Poly]

    def __post_init__(self):
        if not self.equations:
            raise GeometryError(f"divisor {self.label} has no chart equation")
        for chart, eq in self.equations.items():
            if eq.is_constant():
                raise GeometryError(f"divisor {self.label} @ {chart}: constant equation")


@dataclass(frozen=True)
class ContractionPoint:
    chart: str
    coordinates: tuple[Fraction, ...]


@dataclass(frozen=True)
class DominanceWitness:
    params: int
    arc: tuple[Poly, ...]
    source_chart: str
    target_chart: str | None = None


DOMINANT = "dominant"
CONTRACTED = "contracted"


@dataclass(frozen=True)
class SourceComponent:
    """A prime divisor on the source, given by local equations.

    ``declared`` is the asserted behaviour (dominant or contracted) or ``None``
    when the tool should classify it on its own. ``certificates`` maps chart
    labels to a contraction point or a dominance witness for that chart.
    """

    label: str
    equations: Mapping[str, Poly]
    declared: str | None = None
    certificates: Mapping[str, ContractionPoint | DominanceWitness] = field(default_factory=dict)

    def __post_init__(self):
        for chart, eq in self.equations.items():
            if eq.is_constant():
                raise GeometryError(f"component {self.label} @ {chart}: constant equation")
        if self.declared not in (None, DOMINANT, CONTRACTED):
            raise GeometryError(f"component {self.label}: bad status {self.declared!r}")

    @property
    def status(self) -> str:
        if not self.certificates:
            return f"declared({self.declared})" if self.declared else "auto"
        kinds = {type(c) for c in self.certificates.values()}
        if kinds == {ContractionPoint}:
            return "contracted(point)"
        if kinds == {DominanceWitness}:
            return "dominant(witness)"
        return "mixed"


@dataclass(frozen=True)
class Classification:
    dominant: bool | None
    certificate: str


# -- certificates ----------------------------------------------------------------


def verify_contraction(fmap: ChartMap, comp: SourceComponent, pt: ContractionPoint) -> bool:
    """True iff ``fmap`` sends ``{p = 0}`` to the single point ``pt``."""
    if fmap.target_dim < 2:
        raise GeometryError("a point certifies contraction only when the target has dimension >= 2")
    if len(pt.coordinates) != fmap.target_dim:
        raise GeometryError("contraction point has the wrong number of coordinates")
    if pt.chart != fmap.target:
        raise GeometryError(f"contraction point lives in chart {pt.chart}, map targets {fmap.target}")
    p = comp.equations[fmap.source]
    for fj, cj in zip(fmap.components, pt.coordinates):
        try:
            exact_divide(fj - Poly.constant(fj.arity, cj), p)
        except NotDivisible:
            return False
    return True


def determinant(rows: Sequence[Sequence[Poly]]) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        entry = rows[0][j]
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = entry * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return Poly.constant(rows[0][0].arity, 0)
    return total


def symbolic_rank_at_least(matrix: Sequence[Sequence[Poly]], r: int) -> bool:
    """True iff some ``r x r`` minor of ``matrix`` is a nonzero polynomial."""
    if r == 0:
        return True
    nrows = len(matrix)
    ncols = len(matrix[0]) if matrix else 0
    for rows in combinations(range(nrows), r):
        for cols in combinations(range(ncols), r):
            sub = [[matrix[i][j] for j in cols] for i in rows]
            if not determinant(sub).is_zero():
                return True
    return False


def verify_dominance(fmap: ChartMap, comp: SourceComponent, divisor: TargetDivisor,
                     w: DominanceWitness) -> bool:
    """Check an arc certificate that ``comp`` dominates ``divisor``.

    The arc must lie on the component, its image must lie in the divisor, and
    the image must have full rank ``w.params`` in the arc parameters.
    """
    if w.params != fmap.target_dim - 1:
        raise GeometryError(f"witness for {comp.label} needs {fmap.target_dim - 1} parameters")
    if len(w.arc) != fmap.source_dim:
        raise GeometryError(f"witness for {comp.label} needs {fmap.source_dim} arc coordinates")
    if any(a.arity != w.params for a in w.arc):
        raise GeometryError(f"witness for {comp.label}: arc arity does not match params")
    p = comp.equations[fmap.source]
    q = divisor.equations[fmap.target]
    if not substitute(p, list(w.arc)).is_zero():
        return False
    image = [substitute(fj, list(w.arc)) for fj in fmap.components]
    if not substitute(q, image).is_zero():
        return False
    if w.params == 0:
        return True
    jac = [[partial_derivative(y, t) for t in range(w.params)] for y in image]
    return symbolic_rank_at_least(jac, w.params)


def auto_contraction_point(fmap: ChartMap, p: Poly) -> tuple[Fraction, ...] | None:
    """The point ``{p = 0}`` collapses to, if each map component is constant
    modulo ``p``; ``None`` otherwise."""
    coords = []
    for fj in fmap.components:
        _, r = divide(fj, p)
        if not r.is_constant():
            return None
        coords.append(r.constant_value())
    return tuple(coords)


def classify_in_chart(fmap: ChartMap, comp: SourceComponent,
                      divisor: TargetDivisor | None = None) -> Classification:
    cert = comp.certificates.get(fmap.source)
    if isinstance(cert, ContractionPoint):
        if verify_contraction(fmap, comp, cert):
            coords = ",".join(str(c) for c in cert.coordinates)
            return Classification(False, f"contracted to ({coords}), verified")
        return Classification(None, "contraction certificate failed")
    if isinstance(cert, DominanceWitness) and divisor is not None:
        if verify_dominance(fmap, comp, divisor, cert):
            return Classification(True, "dominance arc verified")
        return Classification(None, "dominance certificate failed")
    if fmap.target_dim == 1:
        return Classification(True, "target is a curve")
    if comp.declared == DOMINANT:
        return Classification(True, "declared dominant (unverified)")
    if comp.declared == CONTRACTED:
        return Classification(False, "declared contracted (unverified)")
    pt = auto_contraction_point(fmap, comp.equations[fmap.source])
    if pt is not None:
        coords = ",".join(str(c) for c in pt)
        return Classification(False, f"contracted to ({coords}), found")
    return Classification(None, "dominance unknown")


# -- decomposition ---------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionEntry:
    component: str
    coefficient: int
    dominant: bool | None
    certificate: str


@dataclass(frozen=True)
class ChartDecomposition:
    chart: str
    target_chart: str
    entries: tuple[DecompositionEntry, ...]
    cofactor: Poly
    factors_through: bool = False

    @property
    def complete(self) -> bool:
        return (not self.factors_through and self.cofactor.is_constant()
                and not self.cofactor.is_zero())


@dataclass(frozen=True)
class PullbackDecomposition:
    divisor: str
    charts: tuple[ChartDecomposition, ...]

    @property
    def complete(self) -> bool:
        return all(c.complete for c in self.charts)

    @property
    def factors_through(self) -> bool:
        return bool(self.charts) and all(c.factors_through for c in self.charts)

    def entries(self):
        for c in self.charts:
            yield from c.entries


def pullback_decompose(fmap: ChartMap, divisor: TargetDivisor,
                       components: Sequence[SourceComponent],
                       classify: Callable[[SourceComponent], Classification] | None = None,
                       ) -> ChartDecomposition:
    """Decompose ``fmap^* divisor`` over the components visible in the source chart."""
    if fmap.target not in divisor.equations:
        raise GeometryError(f"divisor {divisor.label} has no equation in chart {fmap.target}")
    g = fmap.pull(divisor.equations[fmap.target])
    if g.is_zero():
        return ChartDecomposition(fmap.source, fmap.target, (), g, factors_through=True)
    if classify is None:
        classify = lambda c: classify_in_chart(fmap, c, divisor)  # noqa: E731
    cofactor = g
    entries = []
    used = []
    for comp in components:
        p = comp.equations.get(fmap.source)
        if p is None:
            continue
        k, cofactor = strip_factor(cofactor, p)
        if k:
            cls = classify(comp)
            entries.append(DecompositionEntry(comp.label, k, cls.dominant, cls.certificate))
            used.append((p, k))
    rebuilt = cofactor
    for p, k in used:
        rebuilt = rebuilt * p ** k
    if rebuilt != g:
        raise AssertionError(f"decomposition of {divisor.label} in {fmap.source} does not reconstruct")
    return ChartDecomposition(fmap.source, fmap.target, tuple(entries), cofactor)


def check_components(polys: Mapping[str, Poly], seed: int = 0) -> list[str]:
    """Best-effort irreducibility sanity check for the equations of one chart.

    Flags constant equations, equations divisible by another listed equation
    with a nonconstant quotient, and equations that fail the square-free test.
    """
    problems = []
    items = list(polys.items())
    for label, p in items:
        if p.is_constant():
            problems.append(f"{label}: constant equation")
            continue
        if not looks_squarefree(p, seed=seed):
            problems.append(f"{label}: not square-free")
        for other, q in items:
            if other == label or q.is_constant():
                continue
            try:
                quo = exact_divide(p, q)
            except NotDivisible:
                continue
            if quo.is_constant():
                problems.append(f"{label}: same hypersurface as {other}")
            else:
                problems.append(f"{label}: divisible by {other}")
    return problems

"""Reader for the line-oriented scenario format.

A scenario describes a morphism ``f: X -> Y`` chart by chart, the target
divisors to examine, candidate source components with their certificates,
optional C-pair boundaries on both sides and, for bundled fixtures, the
expected results. Sections::

    [atlas source|target] name=<label> dim=<int>
    chart <label>: <var>,<var>,...
    [map] neat=true|false
    <srcChart> -> <tgtChart>: <poly>; <poly>; ...
    [divisor target]
    <label> @ <chart>: <poly>
    [component]
    <label> @ <chart>: <poly> status=dominant|contracted [point=(..)] [arc=(..) params=<e>]
    [pair source|target]
    <label> mult=<int>|inf
    [expect]
    orbibase <label>=<int>|inf|absent
    check=yes|no|factors
    forms=yes|no|factors|partial
    compose-with=<stage> orbibase-trivial | check=.. | pair-check=..

A second map ``g: Y -> Z`` (a *stage*) is declared with ``[atlas <stage>]``,
``[map <stage>]``, ``[divisor <stage>]`` and ``[pair <stage>]``; its source
components are the target divisors of ``f``.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .exactpoly import INF, Poly, PolySyntaxError, parse_poly, parse_rational
from .geometry import (
    Atlas,
    Chart,
    ChartMap,
    ContractionPoint,
    DominanceWitness,
    GeometryError,
    SourceComponent,
    TargetDivisor,
    check_components,
)
from .orbifold import CDivisor, MorphismData

FIXTURE_DIR = Path(__file__).parent / "fixtures"


class ScenarioError(ValueError):
    kind = "error"

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<scenario>"):
        where = f"{source}:{line}:{column}" if line else source
        super().__init__(f"{where}: {self.kind}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ScenarioSyntaxError(ScenarioError):
    kind = "parse error"


class UnresolvedLabel(ScenarioError):
    kind = "unresolved label"


class ArityMismatch(ScenarioError):
    kind = "arity mismatch"


@dataclass(frozen=True)
class Expectation:
    kind: str  # orbibase | check | forms | compose
    key: str
    expected: str
    line: int
    stage: str | None = None

    def describe(self) -> str:
        if self.kind == "orbibase":
            return f"orbibase {self.key}={self.expected}"
        if self.kind == "compose":
            return f"compose-with={self.stage} {self.key}={self.expected}"
        return f"{self.kind}={self.expected}"


@dataclass
class Stage:
    name: str
    atlas: Atlas
    morphism: MorphismData
    divisors: tuple[TargetDivisor, ...]
    pair: CDivisor | None


@dataclass
class Scenario:
    name: str
    source: Atlas
    target: Atlas
    morphism: MorphismData
    divisors: tuple[TargetDivisor, ...]
    components: tuple[SourceComponent, ...]
    source_pair: CDivisor | None = None
    target_pair: CDivisor | None = None
    stages: dict[str, Stage] = field(default_factory=dict)
    expectations: list[Expectation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    component_lines: int = 0

    def divisor(self, label: str) -> TargetDivisor:
        for d in self.divisors:
            if d.label == label:
                return d
        raise KeyError(label)


_HEADER = re.compile(r"^\[(\w[\w-]*)(?:\s+([\w-]+))?\]\s*(.*)$")
_LABEL = r"[A-Za-z_][A-Za-z0-9_'.-]*"
_CHART_LINE = re.compile(rf"^chart\s+({_LABEL})\s*:\s*(.*)$")
_MAP_LINE = re.compile(rf"^({_LABEL})\s*->\s*({_LABEL})\s*:\s*(.*)$")
_AT_LINE = re.compile(rf"^({_LABEL})\s*@\s*({_LABEL})\s*:\s*(.*)$")
_PAIR_LINE = re.compile(rf"^({_LABEL})\s+mult\s*=\s*(\w+)\s*$")
_VAR = re.compile(r"^[a-zA-Z][a-zA-Z0-9_]*$")
_OPTION_START = re.compile(r"\s(status|point|arc|params)=")


def _keyvals(text: str, line: int, src: str) -> dict[str, str]:
    out = {}
    for tok in text.split():
        if "=" not in tok:
            raise ScenarioSyntaxError(f"expected key=value, got {tok!r}", line, 1, src)
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _split_options(text: str, line: int, col: int, src: str) -> tuple[str, dict[str, str]]:
    m = _OPTION_START.search(" " + text)
    if m is None:
        return text.strip(), {}
    cut = m.start()
    head, rest = text[:cut], text[cut:]
    opts = {}
    i = 0
    while i < len(rest):
        if rest[i].isspace():
            i += 1
            continue
        km = re.match(r"(\w+)=", rest[i:])
        if km is None:
            raise ScenarioSyntaxError(f"bad option near {rest[i:]!r}", line, col + cut + i, src)
        key = km.group(1)
        i += km.end()
        if i < len(rest) and rest[i] == "(":
            depth = 0
            j = i
            while j < len(rest):
                if rest[j] == "(":
                    depth += 1
                elif rest[j] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if depth:
                raise ScenarioSyntaxError("unbalanced parentheses", line, col + cut + i, src)
            opts[key] = rest[i:j + 1]
            i = j + 1
        else:
            j = i
            while j < len(rest) and not rest[j].isspace():
                j += 1
            opts[key] = rest[i:j]
            i = j
    return head.strip(), opts


def _split_tuple(text: str) -> list[str]:
    inner = text.strip()
    if not (inner.startswith("(") and inner.endswith(")")):
        raise ValueError(f"expected a parenthesized tuple, got {text!r}")
    inner = inner[1:-1]
    parts, depth, cur = [], 0, ""
    for ch in inner:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts]


def _mult(text: str, line: int, src: str):
    if text == "inf":
        return INF
    if not text.isdigit() or int(text) < 1:
        raise ScenarioSyntaxError(f"multiplicity must be a positive integer or inf, got {text!r}",
                                  line, 1, src)
    return int(text)


class _Reader:
    def __init__(self, text: str, source: str):
        self.src = source
        self.lines = text.splitlines()
        self.atlases: dict[str, tuple[Atlas, int]] = {}
        self.maps: dict[str, list[tuple[int, str, str, str]]] = {}
        self.map_opts: dict[str, dict[str, str]] = {}
        self.divisors: dict[str, list[tuple[int, str, str, str]]] = {}
        self.components: list[tuple[int, str, str, str, dict[str, str]]] = []
        self.pairs: dict[str, list[tuple[int, str, str]]] = {}
        self.expect: list[tuple[int, str]] = []
        self.name = Path(source).stem if source != "<scenario>" else "scenario"

    def fail(self, cls, msg, line, col=1):
        raise cls(msg, line, col, self.src)

    def read(self) -> Scenario:
        section = None
        arg = None
        charts: list[Chart] = []
        atlas_meta = None
        for no, raw in enumerate(self.lines, 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            line = line.strip()
            h = _HEADER.match(line)
            if h:
                if section == "atlas":
                    self._close_atlas(atlas_meta, charts)
                section, arg, rest = h.group(1), h.group(2), h.group(3)
                opts = _keyvals(rest, no, self.src)
                if section == "atlas":
                    if arg is None:
                        self.fail(ScenarioSyntaxError, "atlas needs a role (source, target or a stage)", no)
                    if "dim" not in opts or not opts["dim"].isdigit():
                        self.fail(ScenarioSyntaxError, "atlas header needs dim=<int>", no)
                    atlas_meta = (arg, opts.get("name", arg), int(opts["dim"]), no)
                    charts = []
                elif section == "map":
                    key = arg or "main"
                    self.maps.setdefault(key, [])
                    self.map_opts[key] = opts
                elif section == "divisor":
                    key = "main" if arg in (None, "target") else arg
                    self.divisors.setdefault(key, [])
                elif section == "pair":
                    if arg is None:
                        self.fail(ScenarioSyntaxError, "pair needs a role (source, target or a stage)", no)
                    self.pairs.setdefault(arg, [])
                elif section == "scenario":
                    self.name = opts.get("name", self.name)
                elif section not in ("component", "expect"):
                    self.fail(ScenarioSyntaxError, f"unknown section [{section}]", no)
                continue
            if section is None:
                self.fail(ScenarioSyntaxError, "content before the first section header", no)
            if section == "atlas":
                m = _CHART_LINE.match(line)
                if not m:
                    self.fail(ScenarioSyntaxError, "expected 'chart <label>: <var>,...'", no)
                names = tuple(v.strip() for v in m.group(2).split(","))
                for v in names:
                    if not _VAR.match(v):
                        self.fail(ScenarioSyntaxError, f"bad variable name {v!r}", no)
                if len(set(names)) != len(names):
                    self.fail(ScenarioSyntaxError, "repeated variable name", no)
                charts.append(Chart(m.group(1), names))
            elif section == "map":
                m = _MAP_LINE.match(line)
                if not m:
                    self.fail(ScenarioSyntaxError, "expected '<src> -> <tgt>: <poly>; ...'", no)
                self.maps[arg or "main"].append((no, m.group(1), m.group(2), m.group(3)))
            elif section == "divisor":
                m = _AT_LINE.match(line)
                if not m:
                    self.fail(ScenarioSyntaxError, "expected '<label> @ <chart>: <poly>'", no)
                key = "main" if arg in (None, "target") else arg
                self.divisors[key].append((no, m.group(1), m.group(2), m.group(3)))
            elif section == "component":
                m = _AT_LINE.match(line)
                if not m:
                    self.fail(ScenarioSyntaxError, "expected '<label> @ <chart>: <poly> status=...'", no)
                poly, opts = _split_options(m.group(3), no, m.start(3) + 1, self.src)
                self.components.append((no, m.group(1), m.group(2), poly, opts))
            elif section == "pair":
                m = _PAIR_LINE.match(line)
                if not m:
                    self.fail(ScenarioSyntaxError, "expected '<label> mult=<int>|inf'", no)
                self.pairs[arg].append((no, m.group(1), m.group(2)))
            elif section == "expect":
                self.expect.append((no, line))
        if section == "atlas":
            self._close_atlas(atlas_meta, charts)
        return self._build()

    def _close_atlas(self, meta, charts):
        role, name, dim, no = meta
        if role in self.atlases:
            self.fail(ScenarioSyntaxError, f"atlas {role} declared twice", no)
        if not charts:
            self.fail(ScenarioSyntaxError, f"atlas {role} has no charts", no)
        for c in charts:
            if c.dimension != dim:
                self.fail(ArityMismatch, f"chart {c.label} has {c.dimension} variables, atlas dim={dim}", no)
        try:
            self.atlases[role] = (Atlas(name, dim, tuple(charts)), no)
        except GeometryError as exc:
            self.fail(ScenarioSyntaxError, str(exc), no)

    def _atlas(self, role: str, line: int) -> Atlas:
        if role not in self.atlases:
            self.fail(UnresolvedLabel, f"no [atlas {role}] section", line)
        return self.atlases[role][0]

    def _chart(self, atlas: Atlas, label: str, line: int) -> Chart:
        try:
            return atlas.chart(label)
        except KeyError:
            self.fail(UnresolvedLabel, f"chart {label!r} not in atlas {atlas.name}", line)

    def _poly(self, text: str, names, line: int, col: int = 0):
        if not col:
            col = self.lines[line - 1].find(text) + 1 or 1
        try:
            return parse_poly(text, names)
        except PolySyntaxError as exc:
            msg = exc.args[0]
            if "unknown variable" in msg:
                self.fail(UnresolvedLabel, msg, line, col + exc.column - 1)
            self.fail(ScenarioSyntaxError, msg, line, col + exc.column - 1)

    def _maps(self, key: str, src: Atlas, tgt: Atlas) -> tuple[ChartMap, ...]:
        out = []
        for no, s, t, body in self.maps.get(key, []):
            sc = self._chart(src, s, no)
            self._chart(tgt, t, no)
            polys = [p.strip() for p in body.split(";")]
            if len(polys) != tgt.dimension:
                self.fail(ArityMismatch, f"map {s} -> {t} has {len(polys)} components, "
                          f"target dimension is {tgt.dimension}", no)
            comps = tuple(self._poly(p, sc.variables, no) for p in polys)
            try:
                out.append(ChartMap(s, t, comps))
            except GeometryError as exc:
                self.fail(ScenarioSyntaxError, str(exc), no)
        return tuple(out)

    def _divisors(self, key: str, atlas: Atlas) -> tuple[TargetDivisor, ...]:
        eqs: dict[str, dict] = {}
        for no, label, chart, body in self.divisors.get(key, []):
            c = self._chart(atlas, chart, no)
            p = self._poly(body, c.variables, no)
            if p.is_constant():
                self.fail(ScenarioSyntaxError, f"divisor {label} has a constant equation", no)
            if chart in eqs.setdefault(label, {}):
                self.fail(ScenarioSyntaxError, f"divisor {label} given twice in chart {chart}", no)
            eqs[label][chart] = p
        return tuple(TargetDivisor(label, e) for label, e in eqs.items())

    def _components(self, src: Atlas, tgt: Atlas) -> tuple[SourceComponent, ...]:
        data: dict[str, dict] = {}
        for no, label, chart, body, opts in self.components:
            c = self._chart(src, chart, no)
            p = self._poly(body, c.variables, no)
            if p.is_constant():
                self.fail(ScenarioSyntaxError, f"component {label} has a constant equation", no)
            entry = data.setdefault(label, {"eqs": {}, "status": None, "certs": {}})
            if chart in entry["eqs"]:
                self.fail(ScenarioSyntaxError, f"component {label} given twice in chart {chart}", no)
            entry["eqs"][chart] = p
            unknown = set(opts) - {"status", "point", "arc", "params"}
            if unknown:
                self.fail(ScenarioSyntaxError, f"unknown options {sorted(unknown)}", no)
            status = opts.get("status")
            if status not in (None, "dominant", "contracted"):
                self.fail(ScenarioSyntaxError, f"bad status {status!r}", no)
            if status:
                if entry["status"] not in (None, status):
                    self.fail(ScenarioSyntaxError, f"component {label} has conflicting statuses", no)
                entry["status"] = status
            target_chart = self._target_chart_for(chart, no)
            if "point" in opts:
                if status != "contracted":
                    self.fail(ScenarioSyntaxError, "point= requires status=contracted", no)
                try:
                    coords = tuple(parse_rational(x) for x in _split_tuple(opts["point"]))
                except ValueError as exc:
                    self.fail(ScenarioSyntaxError, str(exc), no)
                if len(coords) != tgt.dimension:
                    self.fail(ArityMismatch, f"point has {len(coords)} coordinates, "
                              f"target dimension is {tgt.dimension}", no)
                entry["certs"][chart] = ContractionPoint(target_chart, coords)
            if "arc" in opts:
                if status != "dominant":
                    self.fail(ScenarioSyntaxError, "arc= requires status=dominant", no)
                if "params" not in opts or not opts["params"].isdigit():
                    self.fail(ScenarioSyntaxError, "arc= requires params=<int>", no)
                e = int(opts["params"])
                if e != tgt.dimension - 1:
                    self.fail(ArityMismatch, f"arc needs params={tgt.dimension - 1}", no)
                names = {f"t{i + 1}": i for i in range(e)}
                if e == 1:
                    names["t"] = 0
                try:
                    parts = _split_tuple(opts["arc"])
                except ValueError as exc:
                    self.fail(ScenarioSyntaxError, str(exc), no)
                if len(parts) != src.dimension:
                    self.fail(ArityMismatch, f"arc has {len(parts)} coordinates, "
                              f"source dimension is {src.dimension}", no)
                arc = tuple(self._poly(x, names, no) if e else self._const(x, no) for x in parts)
                entry["certs"][chart] = DominanceWitness(e, arc, chart, target_chart)
        return tuple(SourceComponent(label, d["eqs"], d["status"], d["certs"])
                     for label, d in data.items())

    def _const(self, text, line):
        try:
            return Poly.constant(0, parse_rational(text))
        except ValueError as exc:
            self.fail(ScenarioSyntaxError, str(exc), line)

    def _target_chart_for(self, chart: str, line: int) -> str:
        for no, s, t, _ in self.maps.get("main", []):
            if s == chart:
                return t
        self.fail(UnresolvedLabel, f"no map from chart {chart}", line)

    def _pair(self, role: str, labels: set[str]) -> CDivisor | None:
        if role not in self.pairs:
            return None
        entries = {}
        for no, label, m in self.pairs[role]:
            if label not in labels:
                self.fail(UnresolvedLabel, f"pair label {label!r} is not declared", no)
            entries[label] = _mult(m, no, self.src)
        return CDivisor(entries)

    def _expectations(self, stages: set[str], labels: set[str]) -> list[Expectation]:
        out = []
        for no, line in self.expect:
            m = re.match(rf"^orbibase\s+({_LABEL})\s*=\s*(\w+)$", line)
            if m:
                if m.group(1) not in labels:
                    self.fail(UnresolvedLabel, f"unknown divisor {m.group(1)!r}", no)
                out.append(Expectation("orbibase", m.group(1), m.group(2), no))
                continue
            m = re.match(r"^(check|forms)\s*=\s*(\w+)$", line)
            if m:
                out.append(Expectation(m.group(1), m.group(1), m.group(2), no))
                continue
            m = re.match(rf"^compose-with\s*=\s*({_LABEL})\s+(.*)$", line)
            if m:
                stage = m.group(1)
                if stage not in stages:
                    self.fail(UnresolvedLabel, f"unknown stage {stage!r}", no)
                for tok in m.group(2).split():
                    if tok == "orbibase-trivial":
                        out.append(Expectation("compose", "orbibase", "trivial", no, stage))
                    elif re.match(r"^(check|pair-check)=(\w+)$", tok):
                        k, v = tok.split("=")
                        out.append(Expectation("compose", k, v, no, stage))
                    else:
                        self.fail(ScenarioSyntaxError, f"unknown compose expectation {tok!r}", no)
                continue
            self.fail(ScenarioSyntaxError, f"cannot read expectation {line!r}", no)
        return out

    def _build(self) -> Scenario:
        src = self._atlas("source", 1)
        tgt = self._atlas("target", 1)
        maps = self._maps("main", src, tgt)
        if not maps:
            self.fail(ScenarioSyntaxError, "no [map] lines", len(self.lines))
        divisors = self._divisors("main", tgt)
        comps = self._components(src, tgt)
        opts = self.map_opts.get("main", {})
        neat = {"true": True, "false": False}.get(opts.get("neat", ""), None)
        try:
            morphism = MorphismData(src, tgt, maps, comps, neat)
        except GeometryError as exc:
            self.fail(ScenarioSyntaxError, str(exc), self.maps["main"][0][0])
        stages = {}
        for role in self.atlases:
            if role in ("source", "target"):
                continue
            atlas = self._atlas(role, 1)
            smaps = self._maps(role, tgt, atlas)
            sdivs = self._divisors(role, atlas)
            ycomps = tuple(SourceComponent(d.label, d.equations) for d in divisors)
            smorph = MorphismData(tgt, atlas, smaps, ycomps)
            stages[role] = Stage(role, atlas, smorph,
                                 sdivs, self._pair(role, {d.label for d in sdivs}))
        for key in self.maps:
            if key != "main" and key not in stages:
                self.fail(UnresolvedLabel, f"[map {key}] has no matching [atlas {key}]", self.maps[key][0][0]
                          if self.maps[key] else 1)
        scenario = Scenario(
            name=self.name,
            source=src,
            target=tgt,
            morphism=morphism,
            divisors=divisors,
            components=comps,
            source_pair=self._pair("source", {c.label for c in comps}),
            target_pair=self._pair("target", {d.label for d in divisors}),
            stages=stages,
            expectations=self._expectations(set(stages), {d.label for d in divisors}),
            component_lines=len(self.components),
        )
        scenario.warnings.extend(_sanity(src, comps) + _sanity(tgt, divisors))
        return scenario


def _sanity(atlas: Atlas, items) -> list[str]:
    warnings = []
    for chart in atlas.charts:
        eqs = {it.label: it.equations[chart.label] for it in items if chart.label in it.equations}
        for problem in check_components(eqs):
            warnings.append(f"chart {chart.label}: {problem}")
    return warnings


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    return _Reader(text, source).read()


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.scn"))


def load_fixture(name: str) -> Scenario:
    path = FIXTURE_DIR / f"{name}.scn"
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture {name!r}; available: {', '.join(fixture_names())}")
    return load_scenario(path)

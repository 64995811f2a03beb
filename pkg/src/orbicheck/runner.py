"""Command dispatch and reports.

Every command fills one plain ``dict`` (the JSON report); the text report is
rendered from that same dict so the two never disagree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .exactpoly import INF
from .geometry import PullbackDecomposition
from .logdiff import FormsResult, detect_cpair_forms
from .orbifold import (
    CDivisor,
    CPair,
    OrbifoldBase,
    PredicateResult,
    Verdict,
    is_cpair_morphism,
    orbifold_base,
)
from .scenario import Scenario, Stage

COMMANDS = ("orbibase", "check", "check-forms", "fixture", "fuzz")


def mult_json(m) -> Any:
    if isinstance(m, Verdict):
        return m.value
    if m == INF:
        return "inf"
    return int(m)


def _required_json(r) -> Any:
    if r == INF:
        return "inf"
    return str(r)


def provenance(dec: PullbackDecomposition, mult) -> str:
    if mult is Verdict.FACTORS_THROUGH:
        return "f maps into it"
    if isinstance(mult, Verdict):
        return "decomposition incomplete or dominance unknown below the minimum"
    dominant = [(e.coefficient, e.component, part.chart)
                for part in dec.charts for e in part.entries if e.dominant]
    if not dominant:
        return "no dominant component over it; taken to lie outside the image"
    c, comp, chart = min(dominant)
    return f"minimum over dominant components, attained by {comp} @ {chart}"


def decomposition_json(dec: PullbackDecomposition, mult, charts=None) -> dict:
    rows = []
    for part in dec.charts:
        if charts is not None and part.chart not in charts:
            continue
        rows.append({
            "chart": part.chart,
            "targetChart": part.target_chart,
            "components": [
                {"label": e.component, "coeff": e.coefficient, "dominant": e.dominant,
                 "certificate": e.certificate}
                for e in part.entries
            ],
            "cofactorConstant": part.complete,
            "factorsThrough": part.factors_through,
        })
    return {"label": dec.divisor, "charts": rows, "multiplicity": mult_json(mult),
            "provenance": provenance(dec, mult)}


def base_json(base: OrbifoldBase) -> dict:
    return {
        "entries": [{"label": k, "multiplicity": mult_json(m), "coefficient": str(base.divisor.coefficient(k))}
                    for k, m in base.divisor.items()],
        "undetermined": base.undetermined,
        "factorsThrough": [k for k, m in base.multiplicities.items() if m is Verdict.FACTORS_THROUGH],
    }


def direct_json(res: PredicateResult) -> dict:
    w = res.witness
    return {
        "verdict": res.verdict.value,
        "witness": None if w is None else {
            "divisor": w.divisor, "component": w.component, "chart": w.chart,
            "coeff": w.coefficient, "required": _required_json(w.required)},
        "divisors": [{"label": c.divisor, "multiplicity": mult_json(c.multiplicity),
                      "outcome": c.outcome.value, "note": c.note} for c in res.checks],
    }


def forms_json(res: FormsResult) -> dict:
    w = res.witness
    return {
        "verdict": res.verdict.value,
        "N": res.N,
        "witness": None if w is None else {
            "divisor": w.divisor, "chart": w.chart, "component": w.component, "order": mult_json(w.order)},
        "orders": [{"divisor": r.divisor, "chart": r.chart, "component": r.component,
                    "order": mult_json(r.order)} for r in res.records],
        "notes": list(res.notes),
    }


@dataclass
class Report:
    data: dict
    errors: list[str] = field(default_factory=list)

    @property
    def failures(self) -> int:
        exp = sum(1 for e in self.data.get("expectations", []) if not e["passed"])
        props = sum(p["failures"] for p in self.data.get("properties", {}).values())
        return exp + props + len(self.errors)

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=False)

    def to_text(self) -> str:
        return render_text(self.data)

    def render(self, fmt: str = "text") -> str:
        return self.to_json() if fmt == "json" else self.to_text()


def render_text(data: dict) -> str:
    out = [f"scenario: {data['scenario']}"]
    for d in data.get("divisors", []):
        out.append(f"divisor {d['label']}: multiplicity {d['multiplicity']} ({d['provenance']})")
        for c in d["charts"]:
            if c["factorsThrough"]:
                out.append(f"  chart {c['chart']} -> {c['targetChart']}: pullback vanishes identically")
                continue
            comps = ", ".join(
                f"{e['label']} coeff={e['coeff']} "
                f"{'dominant' if e['dominant'] else 'contracted' if e['dominant'] is False else 'unknown'}"
                f" [{e['certificate']}]"
                for e in c["components"]) or "no components"
            tail = "cofactor constant" if c["cofactorConstant"] else "cofactor NOT constant (incomplete)"
            out.append(f"  chart {c['chart']} -> {c['targetChart']}: {comps}; {tail}")
    base = data.get("orbifoldBase")
    if base is not None:
        if base["entries"]:
            body = ", ".join(f"{e['label']}={e['multiplicity']}" for e in base["entries"])
            coeffs = " + ".join(f"({e['coefficient']}){e['label']}" for e in base["entries"])
            out.append(f"orbifold base: {body}   [{coeffs}]")
        else:
            out.append("orbifold base: 0")
        if base["undetermined"]:
            out.append(f"  undetermined: {', '.join(base['undetermined'])}")
        if base["factorsThrough"]:
            out.append(f"  factors through: {', '.join(base['factorsThrough'])}")
    verdicts = data.get("verdicts", {})
    direct = verdicts.get("direct")
    if direct is not None:
        line = f"verdict direct: {direct['verdict']}"
        w = direct["witness"]
        if w:
            line += (f" (witness: {w['component']} @ {w['chart']} in pullback of {w['divisor']}, "
                     f"coeff {w['coeff']} < required {w['required']})")
        out.append(line)
        for c in direct["divisors"]:
            note = f" ({c['note']})" if c["note"] else ""
            out.append(f"  {c['label']} mult={c['multiplicity']}: {c['outcome']}{note}")
    forms = verdicts.get("forms")
    if forms is not None:
        line = f"verdict forms: {forms['verdict']} (N={forms['N']})"
        w = forms["witness"]
        if w:
            line += f" (witness: order {w['order']} along {w['component']} @ {w['chart']} for {w['divisor']})"
        out.append(line)
        for r in forms["orders"]:
            out.append(f"  order {r['divisor']} / {r['component']} @ {r['chart']}: {r['order']}")
        for n in forms["notes"]:
            out.append(f"  note: {n}")
    for name, stage in verdicts.get("stages", {}).items():
        for key, val in stage.items():
            out.append(f"stage {name} {key}: {val}")
    for note in verdicts.get("notes", []):
        out.append(f"note: {note}")
    for name, p in data.get("properties", {}).items():
        status = "pass" if p["failures"] == 0 else "FAIL"
        out.append(f"property {name}: {status} ({p['instances']} instances, "
                   f"{p['checked']} non-vacuous, {p['failures']} failures)")
        for cx in p.get("counterexamples", []):
            out.append(f"  counterexample: {json.dumps(cx)}")
    for e in data.get("expectations", []):
        status = "pass" if e["passed"] else "FAIL"
        out.append(f"expectation {e['expectation']}: {status} (actual {e['actual']})")
    return "\n".join(out) + "\n"


# -- evaluation ---------------------------------------------------------------------


def effective_target_pair(scn: Scenario, base: OrbifoldBase) -> CDivisor:
    return scn.target_pair if scn.target_pair is not None else base.divisor


def _stage_pair(stage: Stage) -> CPair:
    return CPair(stage.atlas, stage.pair or CDivisor(),
                 {d.label: d for d in stage.divisors})


def evaluate(scn: Scenario, what: set[str], N: int | None = None, charts=None) -> dict:
    """Run the requested computations and return the shared report dict."""
    data: dict = {"scenario": scn.name, "divisors": [], "orbifoldBase": None,
                  "verdicts": {"direct": None, "forms": None, "N": None, "notes": list(scn.warnings)},
                  "properties": {}, "expectations": []}
    base = orbifold_base(scn.morphism, scn.divisors)
    computed: dict[str, Any] = {"base": base}
    if "orbibase" in what:
        data["divisors"] = [decomposition_json(base.decompositions[d.label], base.multiplicities[d.label], charts)
                            for d in scn.divisors]
        data["orbifoldBase"] = base_json(base)
    delta_x = scn.source_pair or CDivisor()
    delta_y = effective_target_pair(scn, base)
    geometry = {d.label: d for d in scn.divisors}
    target = CPair(scn.target, delta_y, geometry)
    if scn.morphism.neat is not None:
        data["verdicts"]["notes"].append(f"neat (declared): {str(scn.morphism.neat).lower()}")
    if "check" in what:
        res = is_cpair_morphism(scn.morphism, delta_x, target)
        computed["check"] = res
        data["verdicts"]["direct"] = direct_json(res)
        if scn.target_pair is None:
            data["verdicts"]["notes"].append("target boundary: computed orbifold base")
    if "forms" in what:
        if not delta_x.is_empty():
            data["verdicts"]["notes"].append("forms oracle ignores the source boundary")
        res = detect_cpair_forms(scn.morphism, target, N=N)
        computed["forms"] = res
        data["verdicts"]["forms"] = forms_json(res)
        data["verdicts"]["N"] = res.N
    if "stages" in what and scn.stages:
        stages = {}
        for name, stage in scn.stages.items():
            comp = scn.morphism.then(stage.morphism)
            cbase = orbifold_base(comp, stage.divisors)
            pair = _stage_pair(stage)
            ccheck = is_cpair_morphism(comp, delta_x, pair)
            pcheck = is_cpair_morphism(stage.morphism, delta_y, pair)
            computed[("stage", name)] = (cbase, ccheck, pcheck)
            stages[name] = {
                "composite orbifold base": ", ".join(
                    f"{k}={mult_json(m)}" for k, m in cbase.divisor.items()) or "0",
                "composite check": ccheck.verdict.value,
                "pair check": pcheck.verdict.value,
            }
        data["verdicts"]["stages"] = stages
    data["expectations"] = check_expectations(scn, computed)
    return data


def check_expectations(scn: Scenario, computed: dict) -> list[dict]:
    out = []
    base: OrbifoldBase = computed["base"]
    for exp in scn.expectations:
        actual = None
        if exp.kind == "orbibase":
            m = base.multiplicities.get(exp.key)
            actual = "absent" if m == 1 else str(mult_json(m))
        elif exp.kind == "check" and "check" in computed:
            actual = computed["check"].verdict.value
        elif exp.kind == "forms" and "forms" in computed:
            actual = computed["forms"].verdict.value
        elif exp.kind == "compose" and ("stage", exp.stage) in computed:
            cbase, ccheck, pcheck = computed[("stage", exp.stage)]
            if exp.key == "orbibase":
                trivial = cbase.divisor.is_empty() and not cbase.undetermined
                actual = "trivial" if trivial else ", ".join(
                    f"{k}={mult_json(m)}" for k, m in cbase.multiplicities.items())
            elif exp.key == "check":
                actual = ccheck.verdict.value
            elif exp.key == "pair-check":
                actual = pcheck.verdict.value
        if actual is None:
            continue
        out.append({"expectation": exp.describe(), "line": exp.line, "expected": exp.expected,
                    "actual": actual, "passed": actual == exp.expected})
    return out


def run_command(cmd: str, scenario: Scenario | None = None, N: int | None = None,
                chart: str | None = None, seed: int = 0, count: int = 200) -> Report:
    if cmd not in COMMANDS:
        raise ValueError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    charts = None if chart is None else {chart}
    if cmd == "fuzz":
        from .fuzz import run_properties

        props = run_properties(seed=seed, count=count)
        data = {"scenario": f"fuzz(seed={seed}, count={count})", "divisors": [], "orbifoldBase": None,
                "verdicts": {"direct": None, "forms": None, "N": None, "notes": []},
                "properties": props, "expectations": []}
        return Report(data)
    if scenario is None:
        raise ValueError(f"command {cmd} needs a scenario")
    what = {
        "orbibase": {"orbibase"},
        "check": {"orbibase", "check"},
        "check-forms": {"forms"},
        "fixture": {"orbibase", "check", "forms", "stages"},
    }[cmd]
    return Report(evaluate(scenario, what, N=N, charts=charts))

"""JSON encodings for every artifact.  Probabilities travel as rational strings."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .bounds import CfQuery, CollapseVerdict, QueryBounds
from .causation import QUANTITIES, CausationReport, FeasibilityReport, GoodnessReport, MARGIN_NAMES
from .errors import ValidationError
from .hierarchy import CounterfactualTable, InterventionalFamily, TwoVarFamily, project_2ve
from .scm import EMPTY, DistTable, Intervention, ScmModel, Unit, ValidationReport, all_valuations, bits, from_bits
from .standard_form import StandardFormModel, atom_from_responses, atom_responses
from .verify import Hypothesis, Leaf, Node, SimReport, SimRow

# ---------------------------------------------------------------- scalars


def rat(q: Fraction) -> str:
    return str(Fraction(q))


def parse_rat(value: Any, where: str = "value") -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"{where}: expected a rational string like \"1/4\", got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: cannot read {value!r} as a rational") from None


def _bit(value: Any, where: str) -> int:
    if value not in (0, 1) or isinstance(value, bool):
        raise ValidationError(f"{where}: expected 0 or 1, got {value!r}")
    return int(value)


def _need(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping) or key not in obj:
        raise ValidationError(f"{where}: missing field {key!r}")
    return obj[key]


def do_to_json(alpha: Intervention) -> dict[str, int]:
    return alpha.assignments


def do_from_json(obj: Any, where: str = "do") -> Intervention:
    if isinstance(obj, str):
        try:
            return Intervention.parse(obj)
        except ValueError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{where}: expected an object of assignments")
    return Intervention.of({str(k): _bit(v, f"{where}.{k}") for k, v in obj.items()})


def _assignment(obj: Any, where: str) -> dict[str, int]:
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{where}: expected an object of assignments")
    return {str(k): _bit(v, f"{where}.{k}") for k, v in obj.items()}


# ---------------------------------------------------------------- models


def model_to_json(model: ScmModel) -> dict:
    mechanisms = {}
    for v in model.variables:
        pars, exos = model.parents[v], model.exo_parents[v]
        rows = []
        for (pv, ev), value in sorted(model.mechanisms.get(v, {}).items()):
            rows.append({"parents": dict(zip(pars, pv)), "exo": dict(zip(exos, ev)), "value": value})
        mechanisms[v] = rows
    return {
        "variables": list(model.variables),
        "parents": {v: list(model.parents[v]) for v in model.variables},
        "exo": [{"name": n, "range": r} for n, r in model.exo],
        "exo_parents": {v: list(model.exo_parents[v]) for v in model.variables},
        "units": [{"p": rat(u.p), "assign": dict(zip(model.exo_names, u.values))} for u in model.units],
        "mechanisms": mechanisms,
    }


def model_from_json(obj: Any, problems: list[str] | None = None) -> ScmModel:
    """Structural decoding only; semantic checks belong to :func:`validate_model`.

    Malformed mechanism rows raise, unless ``problems`` is given: then they
    are recorded there and skipped, so one report can list everything.
    """
    where = "model"

    def row_problem(msg: str) -> None:
        if problems is None:
            raise ValidationError(msg)
        problems.append(msg)

    variables = _need(obj, "variables", where)
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ValidationError("model.variables: expected a list of names")
    parents = {str(k): tuple(v) for k, v in obj.get("parents", {}).items()}
    exo = []
    for i, e in enumerate(obj.get("exo", [])):
        rng = _need(e, "range", f"model.exo[{i}]")
        if not isinstance(rng, int) or isinstance(rng, bool):
            raise ValidationError(f"model.exo[{i}].range: expected an integer")
        exo.append((str(_need(e, "name", f"model.exo[{i}]")), rng))
    exo_names = [n for n, _ in exo]
    exo_parents = {str(k): tuple(v) for k, v in obj.get("exo_parents", {}).items()}
    for v in list(parents) + list(exo_parents):
        if v not in variables:
            raise ValidationError(f"model: parents listed for unknown variable {v!r}")
    units = []
    for i, u in enumerate(_need(obj, "units", where)):
        assign = _need(u, "assign", f"model.units[{i}]")
        if not isinstance(assign, Mapping) or set(assign) != set(exo_names):
            raise ValidationError(f"model.units[{i}].assign must give every exogenous variable exactly once")
        values = tuple(assign[n] for n in exo_names)
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in values):
            raise ValidationError(f"model.units[{i}].assign: values must be integers")
        units.append(Unit(values, parse_rat(_need(u, "p", f"model.units[{i}]"), f"model.units[{i}].p")))
    mechanisms = {}
    raw = _need(obj, "mechanisms", where)
    for v in variables:
        pars, exos = parents.get(v, ()), exo_parents.get(v, ())
        table = {}
        for j, row in enumerate(raw.get(v, [])):
            w = f"model.mechanisms.{v}[{j}]"
            pa = row.get("parents", {})
            ex = row.get("exo", {})
            if set(pa) != set(pars) or set(ex) != set(exos):
                row_problem(f"{w}: row must assign exactly the parents {list(pars)} and exo {list(exos)}")
                continue
            key = (tuple(_bit(pa[p], w) for p in pars), tuple(int(ex[e]) for e in exos))
            if key in table:
                row_problem(f"{w}: duplicate row")
                continue
            table[key] = _need(row, "value", w)
        mechanisms[v] = table
    for v in raw:
        if v not in variables:
            raise ValidationError(f"model.mechanisms: unknown variable {v!r}")
    return ScmModel(tuple(variables), parents, tuple(exo), exo_parents, tuple(units), mechanisms)


def standard_form_to_json(m: StandardFormModel) -> dict:
    return {
        "order": list(m.order),
        "atoms": [{"p": rat(p), "responses": atom_responses(m.order, a)} for a, p in m.atoms.items()],
    }


def standard_form_from_json(obj: Any) -> StandardFormModel:
    order = tuple(_need(obj, "order", "standard form"))
    atoms: dict = {}
    for i, a in enumerate(_need(obj, "atoms", "standard form")):
        w = f"atoms[{i}]"
        try:
            atom = atom_from_responses(order, _need(a, "responses", w))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{w}.responses: incomplete or malformed ({exc})") from None
        if any(b not in (0, 1) for r in atom for b in r):
            raise ValidationError(f"{w}.responses: values must be 0 or 1")
        atoms[atom] = atoms.get(atom, Fraction(0)) + parse_rat(_need(a, "p", w), f"{w}.p")
    try:
        return StandardFormModel(order, atoms)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


# ---------------------------------------------------------------- level tables


def _cells_to_json(cells: Mapping) -> dict[str, str]:
    return {bits(k): rat(p) for k, p in cells.items()}


def _cells_from_json(obj: Any, width: int, where: str) -> dict:
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{where}: expected an object of cells")
    out = {}
    for k, p in obj.items():
        if len(k) != width or set(k) - {"0", "1"}:
            raise ValidationError(f"{where}: bad cell key {k!r} for {width} variables")
        out[from_bits(k)] = parse_rat(p, f"{where}.{k}")
    return out


def dist_to_json(t: DistTable) -> dict:
    return {"scope": list(t.scope), "cells": _cells_to_json(t.cells)}


def dist_from_json(obj: Any) -> DistTable:
    scope = tuple(_need(obj, "scope", "table"))
    return DistTable(scope, _cells_from_json(_need(obj, "cells", "table"), len(scope), "table.cells"))


def family_to_json(f: InterventionalFamily) -> dict:
    return {
        "scope": list(f.scope),
        "entries": [{"do": do_to_json(a), "cells": _cells_to_json(t.cells)} for a, t in f.entries.items()],
    }


def family_from_json(obj: Any) -> InterventionalFamily:
    scope = tuple(_need(obj, "scope", "Level-2 file"))
    entries = {}
    for i, e in enumerate(_need(obj, "entries", "Level-2 file")):
        alpha = do_from_json(e.get("do", {}), f"entries[{i}].do")
        if alpha in entries:
            raise ValidationError(f"entries[{i}]: duplicate intervention {alpha}")
        entries[alpha] = DistTable(scope, _cells_from_json(_need(e, "cells", f"entries[{i}]"), len(scope), f"entries[{i}].cells"))
    return InterventionalFamily(scope, entries)


def l3_to_json(t: CounterfactualTable) -> dict:
    return {
        "scope": list(t.scope),
        "interventions": [do_to_json(a) for a in t.interventions],
        "cells": {CounterfactualTable.key_string(k): rat(p) for k, p in t.cells.items()},
    }


def l3_from_json(obj: Any) -> CounterfactualTable:
    scope = tuple(_need(obj, "scope", "Level-3 file"))
    alphas = tuple(do_from_json(a, f"interventions[{i}]") for i, a in enumerate(_need(obj, "interventions", "Level-3 file")))
    cells = {}
    for k, p in _need(obj, "cells", "Level-3 file").items():
        parts = k.split("|") if alphas else []
        if len(parts) != len(alphas) or any(len(s) != len(scope) or set(s) - {"0", "1"} for s in parts):
            raise ValidationError(f"Level-3 file: bad cell key {k!r}")
        cells[tuple(from_bits(s) for s in parts)] = parse_rat(p, f"cells.{k}")
    return CounterfactualTable(alphas, scope, cells)


def two_var_to_json(f: TwoVarFamily) -> dict:
    return {
        "x": f.x_var,
        "y": f.y_var,
        "obs": _cells_to_json(f.obs.cells),
        "do_x0": _cells_to_json(f.do_x0.cells),
        "do_x1": _cells_to_json(f.do_x1.cells),
    }


def two_var_from_json(obj: Any, x_var: str | None = None, y_var: str | None = None) -> TwoVarFamily:
    """Accepts the compact 2VE form or any Level-2 file holding do(), do(X=0) and do(X=1)."""
    if isinstance(obj, Mapping) and "entries" in obj:
        fam = family_from_json(obj)
        x_var = x_var or fam.scope[0]
        y_var = y_var or fam.scope[-1]
        for a in (EMPTY, Intervention.of({x_var: 0}), Intervention.of({x_var: 1})):
            if a not in fam:
                raise ValidationError(f"Level-2 file lacks {a}, needed for the 2VE summary")
        return project_2ve(fam, x_var, y_var)
    x_var = str(obj.get("x", x_var or "X")) if isinstance(obj, Mapping) else "X"
    y_var = str(obj.get("y", y_var or "Y"))
    tables = [
        DistTable((x_var, y_var), _cells_from_json(_need(obj, k, "2VE file"), 2, f"2VE file.{k}"))
        for k in ("obs", "do_x0", "do_x1")
    ]
    return TwoVarFamily(x_var, y_var, *tables)


# ---------------------------------------------------------------- queries and reports


def _conjuncts_to_json(conj) -> list[dict]:
    return [{"do": do_to_json(a), "outcome": dict(e)} for a, e in conj]


def _conjuncts_from_json(obj: Any, where: str) -> tuple:
    if not isinstance(obj, list):
        raise ValidationError(f"{where}: expected a list of conjuncts")
    return tuple(
        (do_from_json(c.get("do", {}), f"{where}[{i}].do"), _assignment(_need(c, "outcome", f"{where}[{i}]"), f"{where}[{i}].outcome"))
        for i, c in enumerate(obj)
    )


def query_to_json(q: CfQuery, given_l2: InterventionalFamily | None = None) -> dict:
    out: dict = {"maximize": {"conjuncts": _conjuncts_to_json(q.conjuncts)}}
    if given_l2 is not None:
        out["given_l2"] = family_to_json(given_l2)
    if q.condition:
        out["condition"] = _conjuncts_to_json(q.condition)
    return out


def query_from_json(obj: Any) -> tuple[CfQuery, InterventionalFamily | None]:
    target = _need(obj, "maximize", "query")
    conj = _conjuncts_from_json(_need(target, "conjuncts", "query.maximize"), "query.maximize.conjuncts")
    cond = _conjuncts_from_json(obj.get("condition", []), "query.condition")
    l2 = family_from_json(obj["given_l2"]) if "given_l2" in obj else None
    return CfQuery(conj, cond), l2


def bounds_to_json(b: QueryBounds, vertices: bool = False) -> dict:
    out: dict = {"lo": rat(b.lo), "hi": rat(b.hi), "collapsed": b.collapsed}
    if vertices:
        out["argmin"] = standard_form_to_json(b.argmin)
        out["argmax"] = standard_form_to_json(b.argmax)
    return out


def collapse_to_json(v: CollapseVerdict) -> dict:
    out: dict = {
        "collapsed": v.collapsed,
        "interventions": [do_to_json(a) for a in v.interventions],
        "cells_checked": v.cells_checked,
    }
    if not v.collapsed:
        out["witness"] = v.witness_key()
        out["interval"] = [rat(v.interval[0]), rat(v.interval[1])]
    return out


def causation_to_json(r: CausationReport) -> dict:
    return {q: "undefined" if v is None else rat(v) for q, v in r.as_dict().items()}


def causation_from_json(obj: Any) -> CausationReport:
    vals = {}
    for q in QUANTITIES:
        raw = _need(obj, q, "causation report")
        vals[q] = None if raw == "undefined" else parse_rat(raw, q)
    return CausationReport(**vals)


def feasibility_to_json(r: FeasibilityReport) -> dict:
    return {"feasible": r.feasible, "violations": list(r.violations)}


def goodness_to_json(r: GoodnessReport) -> dict:
    return {
        "feasible": r.feasible,
        "good": r.good,
        "x": r.x,
        "margins": {name: rat(m) for name, m in zip(MARGIN_NAMES, r.margins)},
        "binding": list(r.binding),
        "violations": list(r.violations),
    }


def goodness_from_json(obj: Any) -> GoodnessReport:
    margins = tuple(parse_rat(obj["margins"][n], n) for n in MARGIN_NAMES)
    return GoodnessReport(obj["feasible"], obj["good"], margins, list(obj["binding"]), obj["x"], list(obj["violations"]))


def validation_to_json(r: ValidationReport) -> dict:
    return {"ok": r.ok, "violations": list(r.violations)}


def hypothesis_to_json(h: Hypothesis) -> dict:
    if isinstance(h, Leaf):
        events = [dict(t) for t in h.event]
        return {"do": do_to_json(h.alpha), "event": events[0] if len(events) == 1 else events, "gt": rat(h.r)}
    return {h.op: [hypothesis_to_json(c) for c in h.children]}


def hypothesis_from_json(obj: Any, where: str = "hypothesis") -> Hypothesis:
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{where}: expected an object")
    for op in ("all", "any"):
        if op in obj:
            if len(obj) != 1 or not isinstance(obj[op], list) or not obj[op]:
                raise ValidationError(f"{where}: {op!r} needs a non-empty list and nothing else")
            return Node(op, tuple(hypothesis_from_json(c, f"{where}.{op}[{i}]") for i, c in enumerate(obj[op])))
    event = _need(obj, "event", where)
    events = event if isinstance(event, list) else [event]
    terms = [_assignment(e, f"{where}.event") for e in events]
    r = parse_rat(_need(obj, "gt", where), f"{where}.gt")
    try:
        return Leaf(do_from_json(obj.get("do", {}), f"{where}.do"), tuple(terms), r)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def sim_report_to_json(r: SimReport) -> dict:
    return {
        "epsilon": rat(r.epsilon),
        "seed": r.seed,
        "leaves": r.leaves,
        "truth": r.truth,
        "rows": [{"n": row.n, "trials": row.trials, "fired": row.fired, "frequency": row.frequency} for row in r.rows],
    }


def sim_report_from_json(obj: Any) -> SimReport:
    rows = [SimRow(int(x["n"]), int(x["trials"]), int(x["fired"])) for x in obj["rows"]]
    return SimReport(parse_rat(obj["epsilon"]), int(obj["seed"]), int(obj["leaves"]), bool(obj["truth"]), rows)


# ---------------------------------------------------------------- files


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def all_cells(n: int) -> list[str]:
    return [bits(v) for v in all_valuations(n)]

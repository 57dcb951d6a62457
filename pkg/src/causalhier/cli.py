"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 infeasible constraints,
4 precondition not met (for example, a family that is not Y-good).
Results go to stdout (or ``--output``); diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import io
from .bounds import bound_query, check_collapse, tian_pearl_pns_bounds
from .causation import check_y_good, probabilities_of_causation, realize_2ve
from .errors import InfeasibleError, ModelError, PreconditionError, ValidationError
from .hierarchy import interventional_family, project_l3
from .scm import EMPTY, Intervention, ScmModel, ValidationReport, all_interventions, observational, validate_model
from .separation import separate
from .standard_form import StandardFormModel, canonicalize, evaluate_terms, monotonic_example, monotonic_reduce, split_l1
from .verify import TestConfig, simulate_verification, y_goodness_complement_hypothesis, y_goodness_hypothesis

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_PRECONDITION = 0, 2, 3, 4
MAX_ALL_INTERVENTIONS = 6


def _load_model(path: str) -> ScmModel:
    """Model file in explicit or standard form; invalid explicit models abort with the full report."""
    obj = io.load(path)
    if isinstance(obj, dict) and "atoms" in obj:
        return io.standard_form_from_json(obj).to_scm()
    problems: list[str] = []
    model = io.model_from_json(obj, problems)
    report = validate_model(model)
    if problems or not report.ok:
        raise ValidationError(ValidationReport(problems + report.violations))
    return model


def _load_standard_form(path: str) -> StandardFormModel:
    obj = io.load(path)
    if isinstance(obj, dict) and "atoms" in obj:
        return io.standard_form_from_json(obj)
    return canonicalize(_load_model(path))


def _parse_interventions(text: str | None, order: Sequence[str]) -> list[Intervention] | None:
    if text is None:
        return None
    if text.strip() == "all":
        if len(order) > MAX_ALL_INTERVENTIONS:
            raise PreconditionError(
                f"--interventions all would list 3^{len(order)} entries; the limit is "
                f"{MAX_ALL_INTERVENTIONS} variables, so pass an explicit list such as \"do(); do X=1\""
            )
        return all_interventions(order)
    out = []
    for part in text.split(";"):
        try:
            out.append(Intervention.parse(part))
        except ValueError as exc:
            raise ModelError(f"bad intervention {part.strip()!r}: {exc}") from None
    return out


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


# ---------------------------------------------------------------- commands


def cmd_eval(args) -> dict:
    model = _load_model(args.model)
    alphas = _parse_interventions(args.interventions, model.variables)
    if args.levels == 1:
        return io.dist_to_json(observational(model))
    if alphas is None:
        alphas = _parse_interventions("all", model.variables)
    if args.levels == 2:
        return io.family_to_json(interventional_family(model, alphas))
    return io.l3_to_json(project_l3(model, alphas))


def cmd_canon(args) -> dict:
    return io.standard_form_to_json(canonicalize(_load_model(args.model)))


def cmd_pns(args) -> dict:
    model = _load_model(args.model)
    x_var, y_var = _xy(args, model.variables)
    out = io.causation_to_json(probabilities_of_causation(model, x_var, y_var, args.x_value, args.y_value))
    if args.with_bounds:
        fam = io.two_var_from_json(io.family_to_json(interventional_family(model)), x_var, y_var)
        lo, hi = tian_pearl_pns_bounds(fam, args.x_value, args.y_value)
        out["pns_bounds"] = [io.rat(lo), io.rat(hi)]
    return out


def _xy(args, order: Sequence[str]) -> tuple[str, str]:
    return args.x_var or order[0], args.y_var or order[-1]


def _load_two_var(args):
    obj = io.load(args.family)
    if isinstance(obj, dict) and ("mechanisms" in obj or "atoms" in obj):
        model = _load_model(args.family)
        x_var, y_var = _xy(args, model.variables)
        alphas = [EMPTY, Intervention.of({x_var: 0}), Intervention.of({x_var: 1})]
        obj = io.family_to_json(interventional_family(model, alphas))
    return io.two_var_from_json(obj, args.x_var, args.y_var)


def cmd_check(args) -> dict:
    return io.goodness_to_json(check_y_good(_load_two_var(args), swapped=args.swapped))


def cmd_realize(args) -> dict:
    return io.standard_form_to_json(realize_2ve(_load_two_var(args)))


def cmd_separate(args) -> dict:
    sf = _load_standard_form(args.model)
    x_var, y_var = _xy(args, sf.order)
    plan, other, report = separate(sf, x_var, y_var, args.delta, x=0 if args.swapped else 1)
    return {
        "original": io.model_to_json(sf.to_scm()),
        "separated": io.model_to_json(other),
        "plan": {
            "x": plan.x_var,
            "y": plan.y_var,
            "x_value": plan.x,
            "y0": plan.y0,
            "y1": plan.y1,
            "delta": io.rat(plan.delta),
            "omega1": io.standard_form_to_json(StandardFormModel(sf.order, {a: sf.atoms[a] / plan.mass1 for a in plan.omega1}))["atoms"],
            "omega2": io.standard_form_to_json(StandardFormModel(sf.order, {a: sf.atoms[a] / plan.mass2 for a in plan.omega2}))["atoms"],
            "mass1": io.rat(plan.mass1),
            "mass2": io.rat(plan.mass2),
            "coupling": [
                {"omega1_index": plan.omega1.index(f1), "omega2_index": plan.omega2.index(f2), "mass": io.rat(c)}
                for (f1, f2), c in plan.coupling.items()
            ],
        },
        "report": {
            "level2_equal": report.level2_equal,
            "interventions_checked": report.interventions_checked,
            "first_level2_difference": report.first_l2_difference,
            "causation": {
                q: ["undefined" if v is None else io.rat(v) for v in pair] for q, pair in report.causation.items()
            },
            "differing": report.differing,
            "witness": [{"do": io.do_to_json(a), "outcome": e} for a, e in report.witness],
            "witness_values": [io.rat(v) for v in report.witness_values],
            "witness_gap": io.rat(report.witness_gap),
        },
    }


def cmd_bounds(args) -> dict:
    query, l2 = io.query_from_json(io.load(args.query))
    if args.l2:
        l2 = io.family_from_json(io.load(args.l2))
    if l2 is None:
        raise ModelError("query has no given_l2 and no --l2 file was supplied")
    order = args.order.split(",") if args.order else None
    return io.bounds_to_json(bound_query(order, l2, query, cap=args.cap), vertices=args.vertices)


def cmd_collapse(args) -> dict:
    obj = io.load(args.family)
    if isinstance(obj, dict) and ("mechanisms" in obj or "atoms" in obj):
        model = _load_model(args.family)
        fam = interventional_family(model)
    else:
        fam = io.family_from_json(obj)
    order = args.order.split(",") if args.order else fam.scope
    alphas = _parse_interventions(args.interventions, order)
    return io.collapse_to_json(check_collapse(order, fam, alphas, cap=args.cap))


def cmd_verify(args) -> dict:
    model = _load_model(args.model)
    if args.hypothesis in ("y-good", "y-good-complement"):
        x_var, y_var = _xy(args, model.variables)
        build = y_goodness_hypothesis if args.hypothesis == "y-good" else y_goodness_complement_hypothesis
        h = build(x_var, y_var, swapped=args.swapped, grid=args.grid)
    else:
        h = io.hypothesis_from_json(io.load(args.hypothesis))
    n_grid = tuple(int(n) for n in args.n_grid.split(","))
    cfg = TestConfig(args.epsilon, n_grid, args.trials, args.seed)
    return io.sim_report_to_json(simulate_verification(model, h, cfg))


def cmd_split_l1(args) -> dict:
    obj = io.load(args.table)
    if isinstance(obj, dict) and "mechanisms" in obj:
        table = observational(_load_model(args.table))
    else:
        table = io.dist_from_json(obj)
    if not table.is_valid():
        raise ModelError("observational table is not a probability distribution")
    order = args.order.split(",") if args.order else None
    nu, nu2 = split_l1(table, order)
    return {"nu": io.standard_form_to_json(nu), "nu_prime": io.standard_form_to_json(nu2)}


def cmd_monotonic(args) -> dict:
    order = args.order.split(",")
    m = monotonic_example(order, cap=args.cap)
    out: dict = {"model": io.standard_form_to_json(m)}
    if args.reduce:
        values = [int(c) for c in args.reduce]
        query = [(order[i], Intervention.of({p: 0 for p in order[:i]}), v) for i, v in enumerate(values)]
        terms = monotonic_reduce(query, order)
        fam = interventional_family(m.to_scm(), sorted({a for _, a, _ in terms}, key=lambda a: (len(a.items), a.items)))
        out["terms"] = [{"coef": c, "do": io.do_to_json(a), "event": e} for c, a, e in terms]
        out["value"] = io.rat(evaluate_terms(terms, fam))
    return out


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommand copies must not reset values given before the subcommand name
        p = argparse.ArgumentParser(add_help=False)
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        p.add_argument("--deterministic", action="store_true", help="omit the generated_at timestamp", **kw)
        p.add_argument("--seed", type=int, help="PRNG seed for sampling commands", **(kw or {"default": 0}))
        p.add_argument("--output", "-o", help="write the result here instead of stdout", **kw)
        return p

    common = global_flags(True)
    parser = argparse.ArgumentParser(
        prog="causalhier", description="Exact tools for the causal hierarchy.", parents=[global_flags(False)]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    def xy(p):
        p.add_argument("--x-var", help="cause variable (default: first in order)")
        p.add_argument("--y-var", help="effect variable (default: last in order)")

    p = add("eval", cmd_eval, "project a model to Level 1, 2 or 3")
    p.add_argument("model")
    p.add_argument("--levels", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--interventions", help='"all" or a ";"-separated list such as "do X=1; do X=0"')

    p = add("canon", cmd_canon, "canonical standard form of a model")
    p.add_argument("model")

    p = add("pns", cmd_pns, "the six probabilities of causation")
    p.add_argument("model")
    xy(p)
    p.add_argument("--x-value", type=int, choices=(0, 1), default=1)
    p.add_argument("--y-value", type=int, choices=(0, 1), default=1)
    p.add_argument("--with-bounds", action="store_true", help="also report closed-form PNS bounds from the 2VE summary")

    p = add("check", cmd_check, "2VE feasibility and Y-goodness")
    p.add_argument("family", help="2VE file, Level-2 file, or model")
    xy(p)
    p.add_argument("--swapped", action="store_true", help="exchange the roles of x and x'")

    p = add("realize", cmd_realize, "a standard-form model reproducing a 2VE family")
    p.add_argument("family")
    xy(p)

    p = add("separate", cmd_separate, "a Level-2-equivalent model that differs at Level 3")
    p.add_argument("model", help="standard-form or explicit model; X must come first")
    xy(p)
    p.add_argument("--delta", type=_frac)
    p.add_argument("--swapped", action="store_true")

    p = add("bounds", cmd_bounds, "exact bounds on a counterfactual query")
    p.add_argument("query")
    p.add_argument("--l2", help="Level-2 file (overrides given_l2)")
    p.add_argument("--order", help="comma-separated variable order")
    p.add_argument("--cap", type=int, default=4)
    p.add_argument("--vertices", action="store_true", help="include optimal models")

    p = add("collapse", cmd_collapse, "does Level-2 data pin the counterfactual table?")
    p.add_argument("family", help="Level-2 file or model")
    p.add_argument("--interventions")
    p.add_argument("--order")
    p.add_argument("--cap", type=int, default=4)

    p = add("verify", cmd_verify, "simulate a finite-sample test of an open hypothesis")
    p.add_argument("model")
    p.add_argument("hypothesis", help='hypothesis file, or "y-good" / "y-good-complement"')
    xy(p)
    p.add_argument("--epsilon", type=_frac, default=Fraction(1, 20))
    p.add_argument("--n-grid", default="10,100,1000,10000")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--grid", type=int, default=4, help="cut-point grid for built-in hypotheses")
    p.add_argument("--swapped", action="store_true")

    p = add("split-l1", cmd_split_l1, "two models equal at Level 1 but not Level 2")
    p.add_argument("table", help="observational table or model")
    p.add_argument("--order")

    p = add("monotonic", cmd_monotonic, "monotonic example and its interventional reduction")
    p.add_argument("--order", default="X,Y")
    p.add_argument("--reduce", help="response bits for the initial segment, e.g. 10")
    p.add_argument("--cap", type=int, default=4)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except ValidationError as exc:
        print(f"error: invalid input\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        for label in exc.violated:
            print(f"  violated: {label}", file=sys.stderr)
        for label, y in exc.certificate.items():
            print(f"  certificate {label}: {y}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if not args.deterministic:
        result = dict(result)
        result["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    text = io.dumps(result)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

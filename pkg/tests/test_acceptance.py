"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible even without ``-s``)
and then asserts, so a failing criterion is both reported and red.
"""

import itertools
import random
import time
from fractions import Fraction as F

import pytest

from causalhier.bounds import bound_query, check_collapse, pns_query, tian_pearl_pns_bounds
from causalhier.catalog import deterministic_model, example1, figure2_model
from causalhier.causation import check_y_good, probabilities_of_causation, realize_2ve
from causalhier.errors import InfeasibleError
from causalhier.hierarchy import interventional_family, project_2ve, project_l3
from causalhier.scm import Intervention, all_interventions, counterfactual_joint, interventional, observational
from causalhier.separation import build_separated, find_witness_sets, separate, two_var_summary, verify_pair
from causalhier.standard_form import canonicalize, evaluate_terms, monotonic_example, monotonic_reduce, split_l1
from causalhier.verify import TestConfig as Config, exact_type1_bound, leaf, simulate_verification, y_goodness_hypothesis

from generators import random_feasible_2ve, random_infeasible_2ve, random_model, random_observational, random_y_good

Q, H = F(1, 4), F(1, 2)


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, elapsed, limit, detail=""):
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        line = f"criterion {number}: {status}  {title}  ({elapsed:.2f}s / limit {limit}s)"
        if detail:
            line += f"  {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, detail or title
        assert within, f"took {elapsed:.2f}s, limit {limit}s"

    return emit


def test_criterion_1_example1_exactness(report):
    t0 = time.perf_counter()
    m = example1()
    obs = observational(m)
    cells_ok = sorted(obs.cells.values()) == [Q] * 4
    # every intervention leaves the law of the untouched variables at its observational value
    do_ok = all(
        interventional(m, a).marginal(rest) == obs.marginal(rest)
        for a in all_interventions(m.variables)
        for rest in [[v for v in m.variables if v not in dict(a.items)]]
    )
    r = probabilities_of_causation(m, "X", "Y")
    ok = cells_ok and do_ok and r.pns == H and r.pns_converse == H
    report(1, "Example 1 exactness", ok, time.perf_counter() - t0, 1, f"pns={r.pns} converse={r.pns_converse}")


def test_criterion_2_figure2_reproduction(report):
    t0 = time.perf_counter()
    sf = canonicalize(figure2_model())
    good = check_y_good(two_var_summary(sf, "X", "Y")).good
    plan = find_witness_sets(sf, "X", "Y")
    other = build_separated(sf, plan, delta=Q)
    masses = [u.p for u in other.units]
    rep = verify_pair(sf.to_scm(), other)
    pns = rep.causation["pns"]
    ok = good and masses == [Q] * 4 and rep.level2_equal and rep.interventions_checked == 9 and pns == (0, Q)
    detail = f"masses={[str(p) for p in masses]} l2_equal={rep.level2_equal}/{rep.interventions_checked} pns={pns[0]} vs {pns[1]}"
    report(2, "Figure 2 separation", ok, time.perf_counter() - t0, 1, detail)


def test_criterion_3_two_var_round_trip(report):
    t0 = time.perf_counter()
    rng = random.Random(3)
    round_trips = 0
    for _ in range(500):
        fam = random_feasible_2ve(rng)
        if project_2ve(interventional_family(realize_2ve(fam).to_scm()), "X", "Y") == fam:
            round_trips += 1
    rejected = 0
    for _ in range(500):
        fam, labels = random_infeasible_2ve(rng)
        try:
            realize_2ve(fam)
        except InfeasibleError as exc:
            rejected += exc.violated == labels
    ok = round_trips == 500 and rejected == 500
    report(3, "2VE realize/project round trip", ok, time.perf_counter() - t0, 30, f"identity {round_trips}/500, rejected {rejected}/500")


def test_criterion_4_canonicalization(report):
    t0 = time.perf_counter()
    rng = random.Random(4)
    agree = 0
    for _ in range(200):
        m = random_model(rng, max_vars=3, max_units=8)
        alphas = all_interventions(m.variables)
        agree += project_l3(canonicalize(m).to_scm(), alphas) == project_l3(m, alphas)
    report(4, "canonicalization preserves Level 3", agree == 200, time.perf_counter() - t0, 60, f"{agree}/200")


def test_criterion_5_separation_suite(report):
    t0 = time.perf_counter()
    rng = random.Random(5)
    passed = 0
    for _ in range(200):
        m = random_y_good(rng, max_vars=3)
        plan, other, rep = separate(m, "X", "Y")
        pns_a, pns_b = rep.causation["pns"]
        l2 = rep.level2_equal and rep.interventions_checked == 3 ** len(m.order)
        gap = abs(pns_b - pns_a) == plan.delta > 0
        open_ = not check_collapse(m.order, interventional_family(m.to_scm())).collapsed
        passed += l2 and gap and open_
    report(5, "separation of Y-good models", passed == 200, time.perf_counter() - t0, 300, f"{passed}/200")


def _atom_query(order, values):
    return [(order[i], Intervention.of({p: 0 for p in order[:i]}), v) for i, v in enumerate(values)]


def test_criterion_6_collapse_witnesses(report):
    t0 = time.perf_counter()
    collapsed = []
    for order in (("X", "Y"), ("X", "Y", "Z")):
        v = check_collapse(order, interventional_family(monotonic_example(order).to_scm()))
        collapsed.append(v.collapsed)
    det = deterministic_model()
    collapsed.append(check_collapse(det.variables, interventional_family(det)).collapsed)
    matches = total = 0
    for order in (("X", "Y"), ("X", "Y", "Z")):
        scm = monotonic_example(order).to_scm()
        fam = interventional_family(scm)
        for k in range(1, len(order) + 1):
            for values in itertools.product((0, 1), repeat=k):
                query = _atom_query(order, values)
                direct = counterfactual_joint(scm, [(a, {v: val}) for v, a, val in query])
                matches += evaluate_terms(monotonic_reduce(query, order), fam) == direct
                total += 1
    ok = all(collapsed) and matches == total
    report(6, "collapse witnesses", ok, time.perf_counter() - t0, 60, f"collapsed={collapsed} reduce {matches}/{total}")


def test_criterion_7_level1_split(report):
    t0 = time.perf_counter()
    rng = random.Random(7)
    passed = 0
    for _ in range(100):
        obs = random_observational(rng)
        nu, nu2 = split_l1(obs)
        a, b = nu.to_scm(), nu2.to_scm()
        same_l1 = observational(a) == observational(b) == obs.marginal(nu.order)
        x_star, y_star = next(k for k, p in obs.marginal(obs.scope[:2]).cells.items() if p)
        alpha = Intervention.of({obs.scope[0]: 1 - x_star})
        y_dag = {obs.scope[1]: 1 - y_star}
        passed += same_l1 and interventional(b, alpha).event(y_dag) - interventional(a, alpha).event(y_dag) > 0
    report(7, "Level 1 never determines Level 2", passed == 100, time.perf_counter() - t0, 30, f"{passed}/100")


def test_criterion_8_pns_bounds(report):
    t0 = time.perf_counter()
    rng = random.Random(8)
    equal = inside = 0
    for _ in range(500):
        fam = random_feasible_2ve(rng)
        b = bound_query(("X", "Y"), fam, pns_query("X", "Y"))
        equal += (b.lo, b.hi) == tian_pearl_pns_bounds(fam)
        truth = probabilities_of_causation(realize_2ve(fam).to_scm(), "X", "Y").pns
        inside += b.lo <= truth <= b.hi
    models = model_inside = 0
    while models < 200:
        m = random_model(rng)
        if len(m.variables) < 2:
            continue
        models += 1
        fam = project_2ve(interventional_family(m), "X", "Y")
        lo, hi = tian_pearl_pns_bounds(fam)
        model_inside += lo <= probabilities_of_causation(m, "X", "Y").pns <= hi
    ok = equal == 500 and inside == 500 and model_inside == 200
    detail = f"LP=closed form {equal}/500, realized PNS inside {inside}/500, random models inside {model_inside}/200"
    report(8, "PNS bounds cross-check", ok, time.perf_counter() - t0, 120, detail)


def test_criterion_9_verifiability(report):
    t0 = time.perf_counter()
    worst = {}
    audit_ok = True
    for eps in (F(1, 100), F(1, 20)):
        for n in (1, 10, 100, 1000):
            for r in (F(0), Q, H, F(3, 4), F(9, 10)):
                bound = exact_type1_bound(leaf({}, {"Y": 1}, r), eps, n, r)
                worst[eps] = max(worst.get(eps, 0), bound)
                audit_ok &= bound <= eps
    cfg = Config(F(1, 20), (10, 100, 1000, 10000), 400, seed=2024)
    h = y_goodness_hypothesis()
    first = simulate_verification(figure2_model(), h, cfg)
    second = simulate_verification(figure2_model(), h, cfg)
    power = first.rows[-1].frequency
    ok = audit_ok and first.truth and power >= 0.95 and first == second
    detail = (
        f"worst type-1 {', '.join(f'eps={e}: {float(w):.4g}' for e, w in worst.items())}; "
        f"power@1e4={power:.3f}; deterministic={first == second}"
    )
    report(9, "verifiability harness", ok, time.perf_counter() - t0, 120, detail)

from fractions import Fraction

import pytest

from dicbound.errors import ProverError
from dicbound.exactlp import solve_feasibility
from dicbound.networks import base_network
from dicbound.prover import (
    ProverProblem,
    appendix_targets,
    dic_constraints,
    elemental_inequalities,
    evaluate_expr,
    expr_from_names,
    prove,
    verify_certificate,
)
from dicbound.sampling import sample_product_distribution

BASE2_WIRING = {(1, 1): ((2, 1),), (2, 1): ((1, 1),)}
BASE3_WIRING = {
    (1, 1): ((2, 1), (3, 1)),
    (2, 1): ((1, 1), (3, 1)),
    (3, 1): ((1, 1), (2, 1)),
}


@pytest.fixture(scope="module")
def base2():
    return dic_constraints(2, [1, 1], BASE2_WIRING)


def test_exact_lp_feasibility_small():
    # x1 - x2 = 1 with x >= 0
    cols = [{0: Fraction(1)}, {0: Fraction(-1)}]
    res = solve_feasibility(cols, {0: Fraction(1)}, 1)
    assert res.feasible and res.solution == {0: Fraction(1)}
    # x1 + x2 = -1 infeasible over the nonnegative orthant
    res2 = solve_feasibility([{0: Fraction(1)}, {0: Fraction(1)}], {0: Fraction(-1)}, 1)
    assert not res2.feasible
    y = res2.farkas
    # certificate: y*A <= 0 and y*b > 0
    assert all(sum(y.get(i, 0) * c for i, c in col.items()) <= 0 for col in [{0: 1}, {0: 1}])
    assert y[0] * Fraction(-1) > 0


def test_elemental_counts():
    assert len(elemental_inequalities(1)) == 1
    assert len(elemental_inequalities(2)) == 5
    assert len(elemental_inequalities(3)) == 9
    for n in (4, 5, 6):
        assert len(elemental_inequalities(n)) == n + n * (n - 1) * 2 ** (n - 3)
    labels = [l for l, _ in elemental_inequalities(4)]
    assert len(labels) == len(set(labels))


def test_elementals_are_self_provable():
    # every generator is trivially derivable from the cone it generates
    names = tuple(f"Z{i+1}" for i in range(4))
    for label, expr in elemental_inequalities(4):
        problem = ProverProblem(variables=names, constraints=(), target=expr, name=label)
        result = prove(problem)
        assert result.provable, label


def test_constraint_counts(base2):
    variables, constraints = base2
    assert len(variables) == 6
    assert len(constraints) == 9
    variables3, constraints3 = dic_constraints(3, [1, 1, 1], BASE3_WIRING)
    assert len(variables3) == 9
    assert len(constraints3) == 13
    labels = [l for l, _ in constraints3]
    assert any("V2,V3" in l and "X1" in l for l in labels)  # pair recoverability


def test_budget_enforced():
    with pytest.raises(ProverError):
        ProverProblem(variables=tuple(f"Z{i}" for i in range(13)), constraints=(), target={1: Fraction(1)})


def test_chain_step_target_provable(base2):
    variables, constraints = base2
    target = expr_from_names(
        variables, {"Y1 V1 V2": 1, "V1 V2": -1, "Y1 X2 Y2": -1, "X2 Y2": 1}
    )
    result = prove(ProverProblem(variables=variables, constraints=constraints, target=target))
    assert result.provable
    assert verify_certificate(result.problem, result.certificate)


def test_reverse_conditioning_not_provable_with_counterexample(base2, shift2_221):
    variables, constraints = base2
    target = expr_from_names(variables, {"Y1 V2": 1, "V2": -1, "Y1": -1})
    problem = ProverProblem(variables=variables, constraints=constraints, target=target)
    result = prove(problem)
    assert result.status == "NotProvable"
    assert "may still hold" in result.message
    # numeric counterexample search: some sampled input law falsifies the target
    net = base_network(shift2_221)
    witnesses = []
    for i in range(40):
        dist = sample_product_distribution([4, 4], 12345, i)
        value = evaluate_expr(problem.target, variables, net, dist)
        if value < -1e-6:
            witnesses.append((i, value))
    assert witnesses, "expected a strict violation among sampled input laws"


def test_equality_provable_both_directions(base2):
    variables, constraints = base2
    fwd = expr_from_names(variables, {"Y1 X1": 1, "X1": -1, "V2": -1})
    bwd = {m: -c for m, c in fwd.items()}
    for target in (fwd, bwd):
        result = prove(ProverProblem(variables=variables, constraints=constraints, target=target))
        assert result.provable


def test_exact_method_agrees_with_guided(base2):
    variables, constraints = base2
    targets = [
        expr_from_names(variables, {"Y1 V1 V2": 1, "V1 V2": -1, "Y1 X2 Y2": -1, "X2 Y2": 1}),
        expr_from_names(variables, {"Y1 V2": 1, "V2": -1, "Y1": -1}),
        expr_from_names(variables, {"X1 X2": 1, "X1": -1, "X2": -1}),
        {m: -c for m, c in expr_from_names(variables, {"X1 X2": 1, "X1": -1, "X2": -1}).items()},
    ]
    for target in targets:
        p = ProverProblem(variables=variables, constraints=constraints, target=target)
        assert prove(p, method="auto").status == prove(p, method="exact").status


def test_certificates_resummed_and_nonnegative(base2):
    variables, constraints = base2
    target = expr_from_names(variables, {"Y2 V1 V2": 1, "V1 V2": -1, "Y2 X1 Y1": -1, "X1 Y1": 1})
    result = prove(ProverProblem(variables=variables, constraints=constraints, target=target))
    assert result.provable
    for label, coeff in result.certificate:
        if not label.startswith("[=]"):
            assert coeff >= 0
    assert verify_certificate(result.problem, result.certificate)
    # tampering with the certificate must break re-summation
    tampered = tuple(
        (label, coeff + 1 if i == 0 else coeff)
        for i, (label, coeff) in enumerate(result.certificate)
    )
    assert not verify_certificate(result.problem, tampered)


@pytest.mark.parametrize("bound_id", ["4a", "4b", "4c", "4d", "4e", "4f", "4g"])
def test_two_user_appendix_targets_provable(bound_id):
    problems = appendix_targets(bound_id)
    assert problems
    for problem in problems:
        result = prove(problem)
        assert result.provable, problem.name
        assert verify_certificate(problem, result.certificate)


@pytest.mark.parametrize("bound_id", ["ineq1", "ineq8", "ineq9"])
def test_three_user_appendix_targets_provable(bound_id):
    problems = appendix_targets(bound_id)
    for problem in problems:
        assert len(problem.variables) <= 10
        result = prove(problem)
        assert result.provable, problem.name


def test_appendix_target_counts_and_shapes():
    assert len(appendix_targets("4c")) == 1  # the single two-step-chain residue
    assert len(appendix_targets("ineq8")) == 2
    for problem in appendix_targets("4f"):
        assert len(problem.variables) <= 8


def test_provable_targets_nonnegative_numerically(shift2_221):
    # sampled-law sanity check of a Provable verdict
    problems = appendix_targets("4e")
    channel = shift2_221
    for problem in problems:
        result = prove(problem)
        assert result.provable
        from dicbound.extend import build_extended, builtin_recipe
        from dicbound.networks import replicate_distribution

        recipe = builtin_recipe("4e", 2)
        net = build_extended(channel, recipe.recipe)
        for i in range(20):
            dist = sample_product_distribution([4, 4], 555, i)
            rdist = replicate_distribution(net, dist)
            value = evaluate_expr(problem.target, problem.variables, net, rdist)
            assert value >= -1e-12, (problem.name, i, value)


def test_largest_residue_problems_provable():
    # the widest steps (11 variables) come from reconstructed three-user
    # recipes; prove one from each of the two hardest shapes
    for bound_id in ("ineq5", "ineq16"):
        problems = [p for p in appendix_targets(bound_id) if len(p.variables) >= 11]
        assert problems
        result = prove(problems[0])
        assert result.provable, problems[0].name
        assert verify_certificate(problems[0], result.certificate)


@pytest.mark.skipif(
    "DICBOUND_FULL_PROVER" not in __import__("os").environ,
    reason="set DICBOUND_FULL_PROVER=1 for the ~90s full sweep",
)
def test_every_bound_residue_provable():
    from dicbound.extend import supported_bounds

    for bound_id in supported_bounds():
        for problem in appendix_targets(bound_id):
            assert prove(problem).provable, problem.name

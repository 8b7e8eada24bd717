import math
from itertools import permutations

import pytest

from dicbound.entropy import SourceDistribution
from dicbound.errors import DicboundError, DistributionError
from dicbound.regions import (
    bound_vector,
    contains,
    load_templates,
    permute_templates,
    region_polytope,
    render_region_svg,
    sample_region,
)
from dicbound.sampling import sample_product_distribution

from conftest import oracle_bound_term


def test_template_inventory():
    two = load_templates(2)
    three = load_templates(3)
    assert [t.id for t in two] == ["4a", "4b", "4c", "4d", "4e", "4f", "4g"]
    assert [t.id for t in three] == [f"ineq{i}" for i in range(1, 29)]
    assert all(all(c >= 0 for c in t.rates) for t in two + three)


def test_xor2_uniform_vector_against_oracle(xor2):
    vector = bound_vector(xor2, SourceDistribution.uniform([2, 2]))
    assert vector.values() == pytest.approx((1, 1, 1, 1, 2, 2, 2), abs=1e-9)
    # cross-check every template term against the first-principles oracle
    tables = [[0.5, 0.5], [0.5, 0.5]]
    for template in load_templates(2):
        want = sum(
            term.mult * oracle_bound_term(xor2, tables, term.y_user, term.given)
            for term in template.terms
        )
        assert abs(vector[template.id] - want) < 1e-9


def test_concat3_uniform_oracle_values(concat3):
    vector = bound_vector(concat3, SourceDistribution.uniform([2, 2, 2]))
    assert vector["ineq1"] == pytest.approx(1.0, abs=1e-9)
    assert vector["ineq8"] == pytest.approx(3.0, abs=1e-9)
    tables = [[0.5, 0.5]] * 3
    for template in load_templates(3):
        want = sum(
            term.mult * oracle_bound_term(concat3, tables, term.y_user, term.given)
            for term in template.terms
        )
        assert abs(vector[template.id] - want) < 1e-9


def test_point_mass_vector_is_zero(shift2_221):
    dist = SourceDistribution.point_mass([4, 4], (2, 3))
    vector = bound_vector(shift2_221, dist)
    assert all(abs(v) < 1e-12 for _, v in vector)


def test_joint_mode_rejected(xor2):
    dist = SourceDistribution("joint", [2, 2], [0.25] * 4)
    with pytest.raises(DistributionError):
        bound_vector(xor2, dist)


def test_bounds_never_exceed_output_entropy_budget(shift2_331):
    # each term is at most the log-size of the output it conditions
    budgets = {
        t.id: sum(term.mult * math.log2(shift2_331.y_sizes[term.y_user - 1]) for term in t.terms)
        for t in load_templates(2)
    }
    for i in range(10):
        dist = sample_product_distribution([8, 8], 3, i)
        for template_id, value in bound_vector(shift2_331, dist):
            assert -1e-12 <= value <= budgets[template_id] + 1e-9


def test_polytope_membership(xor2):
    templates = load_templates(2)
    vector = bound_vector(xor2, SourceDistribution.uniform([2, 2]))
    poly = region_polytope(vector, templates)
    assert contains(poly, (0.4, 0.4))
    assert not contains(poly, (0.7, 0.5))  # violates the sum-rate 1
    assert contains(poly, (0.0, 0.0))
    assert not contains(poly, (-0.1, 0.0))


def test_region_monotone_under_extra_halfspaces(xor2):
    templates = load_templates(2)
    vector = bound_vector(xor2, SourceDistribution.uniform([2, 2]))
    poly = region_polytope(vector, templates)
    from dicbound.regions import RegionPolytope

    tighter = RegionPolytope(2, poly.halfspaces + (((1, 1), 0.5),))
    for point in [(0.1, 0.1), (0.4, 0.4), (0.9, 0.05), (0.3, 0.05)]:
        if contains(tighter, point):
            assert contains(poly, point)


def test_permutations():
    templates = load_templates(2)
    swapped = permute_templates(templates, [2, 1])
    by_id = {t.id: t for t in templates}
    # relabeling the single-rate bound for user 1 yields the user-2 bound
    assert swapped[0].rates == by_id["4b"].rates
    assert swapped[0].terms == by_id["4b"].terms
    assert permute_templates(swapped, [2, 1]) == templates
    assert permute_templates(templates, [1, 2]) == templates
    with pytest.raises(DicboundError):
        permute_templates(templates, [1, 1])


def test_three_user_permutation_symmetry(concat3):
    # union over all relabelings is invariant under permuting the rate axes
    base = load_templates(3)
    dist = SourceDistribution.uniform([2, 2, 2])
    polys = []
    for perm in permutations((1, 2, 3)):
        templates = permute_templates(base, perm)
        polys.append(region_polytope(bound_vector(concat3, dist, templates), templates))

    def in_union(point):
        return any(contains(p, point) for p in polys)

    probes = [(0.3, 0.2, 0.1), (0.5, 0.1, 0.2), (0.9, 0.05, 0.02), (0.34, 0.33, 0.3)]
    for point in probes:
        value = in_union(point)
        for perm in permutations((0, 1, 2)):
            assert in_union(tuple(point[i] for i in perm)) == value


def test_sample_region_determinism_and_membership(xor2):
    fam1 = sample_region(xor2, 17, 8)
    fam2 = sample_region(xor2, 17, 8)
    assert fam1.polytopes == fam2.polytopes
    # first sample is the uniform region
    only_uniform = sample_region(xor2, 17, 1)
    templates = load_templates(2)
    uniform_poly = region_polytope(
        bound_vector(xor2, SourceDistribution.uniform([2, 2])), templates
    )
    assert only_uniform.polytopes == (uniform_poly,)
    assert fam1.contains((0.4, 0.4))
    assert not fam1.contains((2.0, 2.0))
    with pytest.raises(DicboundError):
        sample_region(xor2, 17, 0)


def test_svg_rendering(xor2):
    fam = sample_region(xor2, 1, 3)
    svg = render_region_svg(fam.polytopes)
    assert svg.startswith("<svg") and "polygon" in svg
    three = load_templates(3)
    from dicbound.regions import RegionPolytope

    with pytest.raises(DicboundError):
        render_region_svg([RegionPolytope(3, (((1, 0, 0), 1.0),))])


def test_polytope_invariants_enforced():
    from dicbound.regions import RegionPolytope

    with pytest.raises(DicboundError):
        RegionPolytope(2, (((1, 0), -0.5),))  # negative rhs
    with pytest.raises(DicboundError):
        RegionPolytope(2, (((1, 0), 1.0),))  # second rate unbounded
    with pytest.raises(DicboundError):
        RegionPolytope(4, (((1, 0, 0, 0), 1.0),))
    RegionPolytope(2, (((1, 0), 1.0), ((0, 1), 1.0)))

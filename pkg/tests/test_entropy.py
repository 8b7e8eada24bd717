import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicbound.channels import builtin_channel
from dicbound.entropy import (
    SourceDistribution,
    V,
    VariableId,
    X,
    Y,
    conditional_entropy,
    entropy,
    induce_joint,
    mutual_information,
)
from dicbound.errors import BudgetExceededError, DicboundError, DistributionError
from dicbound.networks import base_network, cond_entropy_network, network_entropy
from dicbound.sampling import sample_product_distribution

from conftest import oracle_cond_entropy, oracle_joint


def test_point_mass_single_atom(xor2):
    dist = SourceDistribution.point_mass([2, 2], (1, 0))
    table = induce_joint(xor2, dist)
    assert len(table.atoms) == 1
    for subset in ([X(1)], [Y(1), Y(2)], [X(1), V(2), Y(1)]):
        assert entropy(table, subset) == 0.0


def test_uniform_product_atoms_and_marginals(xor2):
    table = induce_joint(xor2, SourceDistribution.uniform([2, 2]))
    assert len(table.atoms) == 4
    assert all(abs(p - 0.25) < 1e-15 for _, p in table.atoms)
    assert entropy(table, []) == 0.0
    assert abs(entropy(table, [Y(1)]) - 1.0) < 1e-12
    assert abs(entropy(table, [X(1), X(2)]) - 2.0) < 1e-12


def test_half_deterministic_product(xor2):
    dist = SourceDistribution("product", [2, 2], [[1.0, 0.0], [0.5, 0.5]])
    table = induce_joint(xor2, dist)
    assert len(table.atoms) == 2
    assert all(abs(p - 0.5) < 1e-15 for _, p in table.atoms)


def test_conditional_entropy_examples(xor2):
    table = induce_joint(xor2, SourceDistribution.uniform([2, 2]))
    assert abs(conditional_entropy(table, [Y(1)], [X(1)]) - 1.0) < 1e-12
    assert abs(conditional_entropy(table, [Y(1)], [X(1)]) - entropy(table, [V(2)])) < 1e-12
    assert conditional_entropy(table, [Y(1)], [X(1), X(2)]) == pytest.approx(0.0, abs=1e-12)
    assert conditional_entropy(table, [Y(2)], []) == entropy(table, [Y(2)])


def test_mutual_information_examples(xor2):
    table = induce_joint(xor2, SourceDistribution.uniform([2, 2]))
    assert abs(mutual_information(table, [X(1)], [Y(1)])) < 1e-12
    a = [Y(1), X(2)]
    assert abs(mutual_information(table, a, a) - entropy(table, a)) < 1e-12
    point = induce_joint(xor2, SourceDistribution.point_mass([2, 2], (0, 1)))
    assert mutual_information(point, [X(1)], [Y(2)]) == pytest.approx(0.0, abs=1e-12)


def test_string_subsets_and_unknown_variable(xor2):
    table = induce_joint(xor2, SourceDistribution.uniform([2, 2]))
    assert entropy(table, ["Y1"]) == entropy(table, [Y(1)])
    with pytest.raises(DicboundError):
        entropy(table, [VariableId("Y", 3)])


def test_distribution_validation():
    with pytest.raises(DistributionError):
        SourceDistribution("product", [2], [[0.7, 0.2]])  # not normalized
    with pytest.raises(DistributionError):
        SourceDistribution("product", [2], [[1.2, -0.2]])  # negative entry
    with pytest.raises(DistributionError):
        SourceDistribution("joint", [2, 2], [0.5, 0.5, 0.25, -0.25])
    uniform_joint = SourceDistribution("joint", [2, 2], [0.25] * 4)
    assert len(uniform_joint.joint) == 4


def test_induce_joint_dimension_mismatch(xor2):
    with pytest.raises(DistributionError):
        induce_joint(xor2, SourceDistribution.uniform([2, 2, 2]))
    with pytest.raises(DistributionError):
        induce_joint(xor2, SourceDistribution.uniform([2, 3]))


def test_atom_budget_enforced(shift2_331):
    dist = SourceDistribution.uniform([8, 8])
    with pytest.raises(BudgetExceededError):
        induce_joint(shift2_331, dist, budget=63)


def test_engine_matches_first_principles_oracle(shift2_221):
    tables = sample_product_distribution([4, 4], 99, 0).tables
    dist = SourceDistribution("product", [4, 4], tables)
    table = induce_joint(shift2_221, dist)
    atoms = oracle_joint(shift2_221, tables)
    want = oracle_cond_entropy(atoms, lambda a: (a[2][0],), lambda a: (a[0][0],))
    got = conditional_entropy(table, [Y(1)], [X(1)])
    assert abs(got - want) < 1e-12


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 10**6),
    mask_a=st.integers(0, 63),
    mask_b=st.integers(0, 63),
)
def test_monotonicity_and_submodularity(seed, mask_a, mask_b):
    channel = builtin_channel("shift2", [2, 2, 1])
    dist = sample_product_distribution([4, 4], seed, 0)
    table = induce_joint(channel, dist)
    variables = list(table.variables)
    a = {variables[i] for i in range(6) if mask_a >> i & 1}
    b = {variables[i] for i in range(6) if mask_b >> i & 1}
    h_a = entropy(table, a)
    h_b = entropy(table, b)
    h_union = entropy(table, a | b)
    h_inter = entropy(table, a & b)
    assert h_union >= h_a - 1e-12
    assert h_a + h_b >= h_union + h_inter - 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), mask=st.integers(0, 63))
def test_everything_determined_by_inputs(seed, mask):
    channel = builtin_channel("xor2")
    dist = sample_product_distribution([2, 2], seed, 1)
    table = induce_joint(channel, dist)
    variables = list(table.variables)
    subset = [variables[i] for i in range(6) if mask >> i & 1]
    h = conditional_entropy(table, subset, [X(1), X(2)])
    assert h == pytest.approx(0.0, abs=1e-12)


def test_interference_entropy_identity_on_all_builtins():
    cases = [
        builtin_channel("xor2"),
        builtin_channel("shift2", [2, 2, 1]),
        builtin_channel("shift2", [3, 3, 2]),
        builtin_channel("concat3"),
    ]
    for channel in cases:
        for i in range(5):
            dist = sample_product_distribution(channel.input_sizes, 13, i)
            table = induce_joint(channel, dist)
            for u in range(channel.user_count):
                interferers = [V(j + 1) for j in channel.interferers(u)]
                lhs = conditional_entropy(table, [Y(u + 1)], [X(u + 1)])
                rhs = entropy(table, interferers)
                assert abs(lhs - rhs) < 1e-12


def test_reduced_network_evaluation_agrees_with_table(shift2_221):
    net = base_network(shift2_221)
    dist = sample_product_distribution([4, 4], 5, 2)
    table = induce_joint(shift2_221, dist)
    got = cond_entropy_network(net, dist, [Y(1)], [X(2), Y(2)])
    want = conditional_entropy(table, [Y(1)], [X(2), Y(2)])
    assert abs(got - want) < 1e-12
    assert abs(network_entropy(net, dist, [Y(1), V(1)]) - entropy(table, [Y(1), V(1)])) < 1e-12


def test_joint_mode_source_distribution(xor2):
    # perfectly correlated inputs force identical interference symbols
    dist = SourceDistribution("joint", [2, 2], {(0, 0): 0.5, (1, 1): 0.5})
    table = induce_joint(xor2, dist)
    assert len(table.atoms) == 2
    assert entropy(table, [Y(1)]) == pytest.approx(0.0, abs=1e-12)
    assert entropy(table, [X(1)]) == pytest.approx(1.0, abs=1e-12)


def test_budget_env_override(shift2_221, monkeypatch):
    from dicbound.entropy import atom_budget

    monkeypatch.setenv("DICBOUND_BUDGET_ATOMS", "8")
    assert atom_budget() == 8
    with pytest.raises(BudgetExceededError):
        induce_joint(shift2_221, SourceDistribution.uniform([4, 4]))
    monkeypatch.delenv("DICBOUND_BUDGET_ATOMS")
    assert atom_budget() == 1 << 22


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), mask_a=st.integers(0, 63), pairs=st.integers(0, 3), extra_v=st.integers(0, 3))
def test_reduced_conditional_entropy_matches_table(seed, mask_a, pairs, extra_v):
    # self-conditioned conditioning sets (every output with its own input)
    # exercise the fast path; compare against the materialized table
    channel = builtin_channel("shift2", [2, 2, 1])
    net = base_network(channel)
    dist = sample_product_distribution([4, 4], seed, 0)
    table = induce_joint(channel, dist)
    variables = list(table.variables)
    a = {variables[i] for i in range(6) if mask_a >> i & 1}
    b = set()
    if pairs & 1:
        b |= {X(1), Y(1)}
    if pairs & 2:
        b |= {X(2), Y(2)}
    if extra_v & 1:
        b.add(V(1))
    if extra_v & 2:
        b.add(X(2))
    got = cond_entropy_network(net, dist, a, b)
    want = conditional_entropy(table, a, b)
    assert abs(got - want) < 1e-12

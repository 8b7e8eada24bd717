"""Shared fixtures and independent oracle helpers.

The oracles here recompute entropies from first principles (plain dicts of
probabilities over enumerated input tuples) so they share no code path with
the engine under test.
"""

from __future__ import annotations

import math
from itertools import product

import pytest

from dicbound.channels import builtin_channel


def oracle_entropy(probs) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0.0)


def oracle_joint(channel, dist_tables):
    """Enumerate all input tuples and their realized symbols, first-principles.

    Returns a list of (x_tuple, v_tuple, y_tuple, prob).
    """
    users = channel.user_count
    atoms = []
    for xs in product(*(range(s) for s in channel.input_sizes)):
        p = 1.0
        for u in range(users):
            p *= dist_tables[u][xs[u]]
        if p == 0.0:
            continue
        vs = tuple(channel.g[u][xs[u]] for u in range(users))
        ys = []
        for u in range(users):
            others = tuple(j for j in range(users) if j != u)
            ys.append(channel.receive(u, xs[u], tuple(vs[j] for j in others)))
        atoms.append((xs, vs, tuple(ys), p))
    return atoms


def oracle_cond_entropy(atoms, pick_a, pick_b) -> float:
    """H(A | B) from the atom list; pick_* map an atom to a value tuple."""
    joint: dict = {}
    marg: dict = {}
    for atom in atoms:
        p = atom[3]
        a, b = pick_a(atom), pick_b(atom)
        joint[(a, b)] = joint.get((a, b), 0.0) + p
        marg[b] = marg.get(b, 0.0) + p
    return oracle_entropy(joint.values()) - oracle_entropy(marg.values())


def oracle_bound_term(channel, dist_tables, y_user, given_users) -> float:
    """H(Y_y | V_given) computed straight from enumerated inputs."""
    atoms = oracle_joint(channel, dist_tables)
    return oracle_cond_entropy(
        atoms,
        lambda a: (a[2][y_user - 1],),
        lambda a: tuple(a[1][u - 1] for u in sorted(given_users)),
    )


@pytest.fixture(scope="session")
def xor2():
    return builtin_channel("xor2")


@pytest.fixture(scope="session")
def shift2_221():
    return builtin_channel("shift2", [2, 2, 1])


@pytest.fixture(scope="session")
def shift2_331():
    return builtin_channel("shift2", [3, 3, 1])


@pytest.fixture(scope="session")
def shift2_332():
    return builtin_channel("shift2", [3, 3, 2])


@pytest.fixture(scope="session")
def concat3():
    return builtin_channel("concat3")

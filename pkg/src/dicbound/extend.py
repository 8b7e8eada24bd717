"""Replicated (extended) networks and the cut chains that recover each bound.

A replication recipe copies each user some number of times and wires every
receiver to exactly one replica of each other user.  Running the base inputs
i.i.d. on all replicas makes every per-replica rate equal the base rate, so a
chain bound on the extended network is a weighted-rate bound on the channel.

Recipes are data (``data/recipes.json``): replica counts, wiring and peel
order, with copy indices affine in the block variable j and the size k.  The
closed form of a chain is *derived*, not transcribed: walking the peel order
while tracking which interference symbols the conditioning pins down reduces
every term to a base-channel conditional entropy H(Y_u | V_A).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

from .channels import DeterministicChannel
from .entropy import SourceDistribution, V, X, Y, conditional_entropy, induce_joint
from .errors import ChainValidationError, DicboundError, RecipeError, UnsupportedBoundError
from .gcs import CutChain, evaluate_chain, validate_chain
from .networks import (
    NetworkGraph,
    Replica,
    base_network,
    cond_entropy_network,
    network_entropy,
    replicate_distribution,
)

IDENTITY_TOL = 1e-9

_TERM_RE = re.compile(r"([+-]?)(\d*)([jk]?)")


def _eval_expr(expr: str, k: int | None, j: int | None = None) -> int:
    """Evaluate an affine index expression like '2j+1', 'k-1', '3'."""
    total = 0
    pos = 0
    text = expr.replace(" ", "")
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise RecipeError(f"cannot parse index expression {expr!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        var = m.group(3)
        if var == "k":
            if k is None:
                raise RecipeError(f"expression {expr!r} needs k")
            total += sign * coeff * k
        elif var == "j":
            if j is None:
                raise RecipeError(f"expression {expr!r} needs a loop variable")
            total += sign * coeff * j
        else:
            if not m.group(2):
                raise RecipeError(f"cannot parse index expression {expr!r}")
            total += sign * coeff
        pos = m.end()
    return total


@dataclass(frozen=True)
class ReplicationRecipe:
    """Replica counts plus, per receiver, the interfering copy of each other user."""

    counts: tuple[int, ...]
    wiring: tuple[tuple[Replica, tuple[Replica, ...]], ...]

    def wiring_map(self) -> dict[Replica, tuple[Replica, ...]]:
        return dict(self.wiring)

    def replicas(self) -> tuple[Replica, ...]:
        return tuple(
            (u + 1, c) for u in range(len(self.counts)) for c in range(1, self.counts[u] + 1)
        )


def build_extended(channel: DeterministicChannel, recipe: ReplicationRecipe) -> NetworkGraph:
    """Instantiate the recipe on a channel; every replica reuses the base tables."""
    if len(recipe.counts) != channel.user_count:
        raise RecipeError(
            f"recipe has {len(recipe.counts)} users, channel has {channel.user_count}"
        )
    for count in recipe.counts:
        if count < 1:
            raise RecipeError("replica counts must be positive")
    wmap = recipe.wiring_map()
    replicas = recipe.replicas()
    for r in replicas:
        wired = wmap.get(r)
        if wired is None:
            raise RecipeError(f"recipe does not wire receiver {r}")
        for u, c in wired:
            if not 1 <= c <= recipe.counts[u - 1]:
                raise RecipeError(f"receiver {r} wired to out-of-range replica ({u},{c})")
    return NetworkGraph(channel=channel, replicas=replicas, wiring=tuple(sorted(wmap.items())))


def recipe_from_dict(data: dict) -> ReplicationRecipe:
    """Recipe file form: {"counts": [..], "wiring": {"1^1": {"2": 1, ...}, ...}}."""
    counts = tuple(int(c) for c in data["counts"])
    wiring = []
    for key, wires in data["wiring"].items():
        user_s, _, copy_s = key.partition("^")
        rx = (int(user_s), int(copy_s) if copy_s else 1)
        wired = tuple(sorted((int(u), int(c)) for u, c in wires.items()))
        wiring.append((rx, wired))
    return ReplicationRecipe(counts=counts, wiring=tuple(sorted(wiring)))


def recipe_to_dict(recipe: ReplicationRecipe) -> dict:
    return {
        "counts": list(recipe.counts),
        "wiring": {
            f"{u}^{c}": {str(w[0]): w[1] for w in wired} for (u, c), wired in recipe.wiring
        },
    }


# -- closed-form derivation ----------------------------------------------------


@dataclass(frozen=True)
class ClosedTerm:
    """One chain term reduced to the base channel: H(Y_user | V_A).

    ``evidence`` records, per conditioned user in A, how the conditioning pins
    that interference symbol down: ("peeled", replica) when the replica's own
    input is conditioned, ("recovered", receiver) when it is recovered from a
    conditioned (input, output) pair.
    """

    level: int
    target: Replica
    given: frozenset[int]
    evidence: tuple[tuple[int, tuple[str, Replica]], ...]

    def describe(self) -> str:
        given = ",".join(f"V{u}" for u in sorted(self.given))
        head = f"H(Y{self.target[0]}^{self.target[1]}"
        return head + (f" | {given})" if given else ")")


def derive_closed_terms(
    counts: Sequence[int],
    wiring: Mapping[Replica, tuple[Replica, ...]],
    peel: Sequence[Sequence[Replica]],
) -> tuple[ClosedTerm, ...]:
    """Walk the peel order and reduce every chain term to H(Y_u | V_A).

    Raises if two targets peeled at the same level share an undetermined
    source, in which case the joint term would not split into base terms.
    """
    known: dict[Replica, tuple[str, Replica]] = {}
    peeled: set[Replica] = set()
    terms = []
    for level_idx, level in enumerate(peel, start=1):
        used_sources: set[Replica] = set()
        for target in level:
            if target in peeled:
                raise RecipeError(f"replica {target} peeled twice")
            given = set()
            evidence = []
            undetermined = {target}
            if target in known:
                given.add(target[0])
                evidence.append((target[0], known[target]))
            for w in wiring[target]:
                if w in known:
                    given.add(w[0])
                    evidence.append((w[0], known[w]))
                else:
                    undetermined.add(w)
            if undetermined & used_sources:
                raise RecipeError(
                    f"level {level_idx}: targets share undetermined source "
                    f"{sorted(undetermined & used_sources)}; closed form would not split"
                )
            used_sources |= undetermined
            terms.append(
                ClosedTerm(
                    level=level_idx,
                    target=target,
                    given=frozenset(given),
                    evidence=tuple(sorted(evidence)),
                )
            )
        for target in level:
            peeled.add(target)
            known.setdefault(target, ("peeled", target))
            for w in wiring[target]:
                known.setdefault(w, ("recovered", target))
    all_replicas = {
        (u + 1, c) for u in range(len(counts)) for c in range(1, counts[u] + 1)
    }
    if peeled != all_replicas:
        raise RecipeError(f"peel order misses replicas {sorted(all_replicas - peeled)}")
    return tuple(terms)


def _term_value(term: ClosedTerm, base_table) -> float:
    return conditional_entropy(base_table, [Y(term.target[0])], [V(u) for u in term.given])


# -- built-in recipes ----------------------------------------------------------


@dataclass(frozen=True)
class BoundRecipe:
    """A bound id instantiated at size k: network recipe, cut chain, rate
    weights, and the derived closed form."""

    bound_id: str
    users: int
    k: int | None
    parametric: bool
    recipe: ReplicationRecipe
    chain: CutChain
    rate_weights: tuple[int, ...]
    closed_terms: tuple[ClosedTerm, ...]
    reconstructed: bool
    recovery_notes: tuple[str, ...] = field(default=(), repr=False)

    def term_counts(self) -> dict[tuple[int, frozenset[int]], int]:
        counts: dict[tuple[int, frozenset[int]], int] = {}
        for t in self.closed_terms:
            key = (t.target[0], t.given)
            counts[key] = counts.get(key, 0) + 1
        return counts


def _load_recipe_specs() -> dict:
    raw = json.loads(resources.files("dicbound.data").joinpath("recipes.json").read_text())
    return {entry["id"]: entry for entry in raw["recipes"]}


def supported_bounds(users: int | None = None) -> tuple[str, ...]:
    specs = _load_recipe_specs()
    ids = [i for i, s in specs.items() if users is None or s["users"] == users]
    return tuple(ids)


def bound_support_info(bound_id: str) -> dict:
    """Raw recipe entry, including reconstruction flags and notes."""
    specs = _load_recipe_specs()
    if bound_id not in specs:
        raise UnsupportedBoundError(f"no built-in recipe for bound {bound_id!r}")
    return specs[bound_id]


def _iter_rule(rule: dict, k: int | None):
    loop = rule.get("loop")
    if loop is None:
        yield None
        return
    var, lo, hi, step = loop
    lo_v = _eval_expr(lo, k)
    hi_v = _eval_expr(hi, k)
    if step not in (1, -1):
        raise RecipeError("loop step must be 1 or -1")
    if (step == 1 and lo_v > hi_v) or (step == -1 and lo_v < hi_v):
        return
    yield from range(lo_v, hi_v + step, step)


def _instantiate(spec: dict, k: int | None):
    counts = tuple(_eval_expr(c, k) for c in spec["counts"])
    wiring: dict[Replica, tuple[Replica, ...]] = {}
    for rule in spec["wiring"]:
        rx_user, rx_copy = rule["rx"]
        for j in _iter_rule(rule, k):
            rx = (int(rx_user), _eval_expr(rx_copy, k, j))
            wired = tuple(
                sorted((int(u), _eval_expr(c, k, j)) for u, c in rule["from"].items())
            )
            if rx in wiring:
                raise RecipeError(f"{spec['id']}: receiver {rx} wired twice")
            wiring[rx] = wired
    peel: list[list[Replica]] = []
    for rule in spec["peel"]:
        for j in _iter_rule(rule, k):
            for level in rule["levels"]:
                peel.append([(int(u), _eval_expr(c, k, j)) for u, c in level])
    return counts, wiring, peel


def _chain_from_peel(counts: Sequence[int], peel: Sequence[Sequence[Replica]]) -> CutChain:
    replicas = [(u + 1, c) for u in range(len(counts)) for c in range(1, counts[u] + 1)]
    remaining = set(replicas)
    subsets = []
    for level in peel:
        sources = frozenset(f"S{u}^{c}" for u, c in remaining)
        remaining -= set(level)
        dests = frozenset(f"D{u}^{c}" for u, c in remaining)
        subsets.append(sources | dests)
    return CutChain(tuple(subsets))


def builtin_recipe(bound_id: str, k: int | None = None) -> BoundRecipe:
    """Instantiate a built-in bound recipe.

    Parametric recipes need k >= 1; constant-size recipes ignore k.
    """
    spec = bound_support_info(bound_id)
    parametric = spec["parametric"]
    if parametric:
        if k is None:
            raise DicboundError(f"bound {bound_id} is parametric; k is required")
        lo, hi = spec.get("k_range", [1, 8])
        if not lo <= k <= hi:
            raise DicboundError(f"bound {bound_id} supports k in {lo}..{hi}, got {k}")
    counts, wiring, peel = _instantiate(spec, k if parametric else None)
    recipe = ReplicationRecipe(counts=counts, wiring=tuple(sorted(wiring.items())))
    closed = derive_closed_terms(counts, wiring, peel)
    return BoundRecipe(
        bound_id=bound_id,
        users=spec["users"],
        k=k if parametric else None,
        parametric=parametric,
        recipe=recipe,
        chain=_chain_from_peel(counts, peel),
        rate_weights=counts,
        closed_terms=closed,
        reconstructed=spec.get("reconstructed", False),
        recovery_notes=tuple(spec.get("recovery", [])),
    )


def recipe_chain(bound: BoundRecipe, network: NetworkGraph) -> CutChain:
    violations = validate_chain(network, bound.chain)
    if violations:
        raise ChainValidationError(violations)
    return bound.chain


# -- verification --------------------------------------------------------------


@dataclass(frozen=True)
class RateReport:
    """Per-replica single-letter I(X;Y) against the base channel value."""

    base_values: tuple[float, ...]
    replica_values: tuple[tuple[Replica, float], ...]
    max_deviation: float


def verify_replica_rates(
    channel: DeterministicChannel, recipe: ReplicationRecipe, dist: SourceDistribution
) -> RateReport:
    """With identical i.i.d. replica inputs, every replica's I(X;Y) must equal
    the base channel's."""
    network = build_extended(channel, recipe)
    rdist = replicate_distribution(network, dist)
    base = base_network(channel)

    def mi(net, d, user, copy):
        y = [Y(user, copy)]
        return network_entropy(net, d, y) - cond_entropy_network(net, d, y, [X(user, copy)])

    base_values = tuple(mi(base, dist, u, 1) for u in range(1, channel.user_count + 1))
    replica_values = []
    deviation = 0.0
    for u, c in network.replicas:
        value = mi(network, rdist, u, c)
        replica_values.append(((u, c), value))
        deviation = max(deviation, abs(value - base_values[u - 1]))
    return RateReport(
        base_values=base_values,
        replica_values=tuple(replica_values),
        max_deviation=deviation,
    )


def chain_closed_form(
    bound: str | BoundRecipe,
    channel: DeterministicChannel,
    dist: SourceDistribution,
    k: int | None = None,
) -> float:
    """Evaluate the derived closed form on the base channel."""
    recipe = bound if isinstance(bound, BoundRecipe) else builtin_recipe(bound, k)
    if k is not None and recipe.parametric and recipe.k != k:
        recipe = builtin_recipe(recipe.bound_id, k)
    table = induce_joint(channel, dist)
    return math.fsum(_term_value(t, table) for t in recipe.closed_terms)


@dataclass(frozen=True)
class IdentityReport:
    bound_id: str
    ok: bool
    per_k: tuple[tuple[int, float, float, float], ...]  # (k, chain, closed, |diff|)
    increments: tuple[float, ...]
    diagnostics: tuple[str, ...]


def verify_chain_identity(
    bound_id: str,
    channel: DeterministicChannel,
    dist: SourceDistribution,
    k_range: Sequence[int] = (1, 2, 3),
    tol: float = IDENTITY_TOL,
) -> IdentityReport:
    """Check evaluate_chain == derived closed form for each k, reporting the
    first diverging term on mismatch and per-k increments."""
    spec = bound_support_info(bound_id)
    ks = list(k_range) if spec["parametric"] else [None]
    table = induce_joint(channel, dist)
    per_k = []
    diagnostics = []
    totals = []
    ok = True
    for k in ks:
        recipe = builtin_recipe(bound_id, k)
        network = build_extended(channel, recipe.recipe)
        chain = recipe_chain(recipe, network)
        rdist = replicate_distribution(network, dist)
        value = evaluate_chain(network, chain, rdist)
        closed_terms = [_term_value(t, table) for t in recipe.closed_terms]
        closed_by_level: dict[int, float] = {}
        for t, v in zip(recipe.closed_terms, closed_terms):
            closed_by_level[t.level] = closed_by_level.get(t.level, 0.0) + v
        closed_total = math.fsum(closed_terms)
        diff = abs(value.total - closed_total)
        if diff > tol:
            ok = False
            for level, term_value in enumerate(value.terms, start=1):
                expected = closed_by_level.get(level, 0.0)
                if abs(term_value - expected) > tol:
                    names = [t.describe() for t in recipe.closed_terms if t.level == level]
                    diagnostics.append(
                        f"k={k}: level {level} evaluates to {term_value:.12g} but the "
                        f"closed form {' + '.join(names) or '0'} gives {expected:.12g}"
                    )
                    break
        per_k.append((k if k is not None else 0, value.total, closed_total, diff))
        totals.append(closed_total)
    increments = tuple(b - a for a, b in zip(totals, totals[1:]))
    return IdentityReport(
        bound_id=bound_id,
        ok=ok,
        per_k=tuple(per_k),
        increments=increments,
        diagnostics=tuple(diagnostics),
    )


def limit_bound(
    bound_id: str, channel: DeterministicChannel, dist: SourceDistribution
) -> tuple[tuple[int, ...], float]:
    """The weighted-rate bound the recipe family yields in the large-size limit.

    Parametric recipes are affine in k, so one difference extracts the per-k
    increment; constant-size recipes contribute their full chain value.
    """
    spec = bound_support_info(bound_id)
    if not spec["parametric"]:
        recipe = builtin_recipe(bound_id)
        return recipe.rate_weights, chain_closed_form(recipe, channel, dist)
    lo, _ = spec.get("k_range", [1, 8])
    r_lo = builtin_recipe(bound_id, lo)
    r_hi = builtin_recipe(bound_id, lo + 1)
    weights = tuple(h - l for l, h in zip(r_lo.rate_weights, r_hi.rate_weights))
    bits = chain_closed_form(r_hi, channel, dist) - chain_closed_form(r_lo, channel, dist)
    return weights, bits


def affine_term_multiplicities(bound_id: str) -> dict[tuple[int, frozenset[int]], tuple[int, int]]:
    """Closed-form term multiplicities as (a, b) meaning a*k + b.

    Validated at three sizes; constant recipes report a = 0.
    """
    spec = bound_support_info(bound_id)
    if not spec["parametric"]:
        return {key: (0, m) for key, m in builtin_recipe(bound_id).term_counts().items()}
    lo, _ = spec.get("k_range", [1, 8])
    counts = [builtin_recipe(bound_id, k).term_counts() for k in (lo, lo + 1, lo + 2)]
    keys = set().union(*counts)
    out = {}
    for key in keys:
        c0, c1, c2 = (c.get(key, 0) for c in counts)
        a = c1 - c0
        b = c0 - a * lo
        if c2 != a * (lo + 2) + b:
            raise RecipeError(f"{bound_id}: term multiplicity for {key} is not affine in k")
        out[key] = (a, b)
    return out

"""One-hop unicast networks built from a deterministic interference channel.

A network is a set of (user, copy) replicas; each replica has a source node
transmitting X and a destination node receiving Y.  Every receiver reuses the
base channel functions and is wired to exactly one replica of each other user.

Entropy queries on a network avoid materializing the full joint: conditioning
on a source's input and its receiver's output pins down the interference it
saw, so each query reduces to a small set of relevant sources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from .channels import DeterministicChannel, validate_channel
from .entropy import (
    SourceDistribution,
    VariableId,
    _entropy_of_probs,
    atom_budget,
)
from .errors import BudgetExceededError, DicboundError, DistributionError, RecipeError

Replica = tuple[int, int]  # (user, copy), both 1-based


def _fmt_replica(replica: Replica, base: bool) -> str:
    user, copy = replica
    return f"{user}" if base else f"{user}^{copy}"


@dataclass(frozen=True)
class NetworkGraph:
    """One-hop K-unicast network: sources transmit only, destinations receive only."""

    channel: DeterministicChannel
    replicas: tuple[Replica, ...]
    wiring: tuple[tuple[Replica, tuple[Replica, ...]], ...]
    base_labels: bool = False
    _wiring_map: Mapping[Replica, tuple[Replica, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        report = validate_channel(self.channel)
        if not report.valid:
            raise RecipeError("channel fails interference recoverability; refusing to build network")
        counts: dict[int, int] = {}
        for user, copy in self.replicas:
            counts[user] = max(counts.get(user, 0), copy)
        if set(counts) != set(range(1, self.channel.user_count + 1)):
            raise RecipeError("replicas must cover every channel user")
        expected = sorted((u, c) for u in counts for c in range(1, counts[u] + 1))
        if sorted(self.replicas) != expected:
            raise RecipeError("replica copies must be dense 1..k per user")
        wmap = dict(self.wiring)
        for r in self.replicas:
            user, _ = r
            others = tuple(j + 1 for j in self.channel.interferers(user - 1))
            wired = wmap.get(r)
            if wired is None:
                raise RecipeError(f"no interference wiring for replica {r}")
            if tuple(w[0] for w in wired) != others:
                raise RecipeError(
                    f"replica {r} must be wired to users {others} in order, got {wired}"
                )
            for w in wired:
                if w not in set(self.replicas):
                    raise RecipeError(f"replica {r} wired to unknown replica {w}")
        object.__setattr__(self, "_wiring_map", wmap)

    # -- structure ----------------------------------------------------------

    def counts(self) -> tuple[int, ...]:
        out = [0] * self.channel.user_count
        for user, copy in self.replicas:
            out[user - 1] = max(out[user - 1], copy)
        return tuple(out)

    def interferers_of(self, replica: Replica) -> tuple[Replica, ...]:
        return self._wiring_map[replica]

    def source_label(self, replica: Replica) -> str:
        return "S" + _fmt_replica(replica, self.base_labels)

    def dest_label(self, replica: Replica) -> str:
        return "D" + _fmt_replica(replica, self.base_labels)

    def nodes(self) -> frozenset[str]:
        labels = set()
        for r in self.replicas:
            labels.add(self.source_label(r))
            labels.add(self.dest_label(r))
        return frozenset(labels)

    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple((self.source_label(r), self.dest_label(r)) for r in self.replicas)

    def replica_of_node(self, label: str) -> tuple[str, Replica]:
        """Return (role, replica) for a node label like 'S1', 'D2^3'."""
        if not label or label[0] not in ("S", "D"):
            raise DicboundError(f"bad node label {label!r}")
        body = label[1:]
        user_s, _, copy_s = body.partition("^")
        try:
            replica = (int(user_s), int(copy_s) if copy_s else 1)
        except ValueError:
            raise DicboundError(f"bad node label {label!r}") from None
        if replica not in self._wiring_map:
            raise DicboundError(f"node {label!r} not in this network")
        return ("source" if label[0] == "S" else "destination", replica)

    # -- variables ----------------------------------------------------------

    def source_variables(self) -> tuple[VariableId, ...]:
        return tuple(VariableId("X", u, c) for u, c in self.replicas)

    def source_sizes(self) -> tuple[int, ...]:
        return tuple(self.channel.input_sizes[u - 1] for u, _ in self.replicas)

    def all_variables(self) -> tuple[VariableId, ...]:
        xs = [VariableId("X", u, c) for u, c in self.replicas]
        vs = [VariableId("V", u, c) for u, c in self.replicas]
        ys = [VariableId("Y", u, c) for u, c in self.replicas]
        return tuple(xs + vs + ys)

    def realize(self, x: tuple[int, ...]) -> tuple[int, ...]:
        """Map a source-input tuple to the full (X.., V.., Y..) value tuple."""
        pos = {r: i for i, r in enumerate(self.replicas)}
        vs = [self.channel.interference(u - 1, x[pos[(u, c)]]) for u, c in self.replicas]
        ys = []
        for r in self.replicas:
            u, _ = r
            v_tuple = tuple(vs[pos[w]] for w in self._wiring_map[r])
            ys.append(self.channel.receive(u - 1, x[pos[r]], v_tuple))
        return tuple(x) + tuple(vs) + tuple(ys)

    def value_of(self, var: VariableId, x: tuple[int, ...], pos: Mapping[Replica, int]) -> int:
        r = (var.user, var.copy)
        if var.kind == "X":
            return x[pos[r]]
        if var.kind == "V":
            return self.channel.interference(var.user - 1, x[pos[r]])
        v_tuple = tuple(
            self.channel.interference(w[0] - 1, x[pos[w]]) for w in self._wiring_map[r]
        )
        return self.channel.receive(var.user - 1, x[pos[r]], v_tuple)

    def dependencies(self, var: VariableId) -> frozenset[Replica]:
        """Source replicas the variable is a function of."""
        r = (var.user, var.copy)
        if var.kind in ("X", "V"):
            return frozenset((r,))
        return frozenset((r,) + self._wiring_map[r])


def base_network(channel: DeterministicChannel) -> NetworkGraph:
    """Wrap a channel as its own one-hop network (nodes S1..  D1..)."""
    replicas = tuple((u, 1) for u in range(1, channel.user_count + 1))
    wiring = tuple(
        ((u, 1), tuple((j + 1, 1) for j in channel.interferers(u - 1)))
        for u in range(1, channel.user_count + 1)
    )
    return NetworkGraph(channel=channel, replicas=replicas, wiring=wiring, base_labels=True)


def replicate_distribution(network: NetworkGraph, base_dist: SourceDistribution) -> SourceDistribution:
    """Product distribution giving every replica its user's base marginal."""
    if base_dist.mode != "product":
        raise DistributionError("replica inputs require a product-mode base distribution")
    if len(base_dist.sizes) != network.channel.user_count:
        raise DistributionError("base distribution must have one factor per channel user")
    tables = [base_dist.tables[u - 1] for u, _ in network.replicas]
    return SourceDistribution("product", network.source_sizes(), tables)


# -- reduced entropy evaluation ----------------------------------------------


def known_closure(network: NetworkGraph, cond: Iterable[VariableId]) -> set[VariableId]:
    """All variables determined by the conditioning set.

    Closure rules: V = g(X); Y determined once its input and all wired
    interference symbols are; and (X, Y) of a receiver determine the wired
    interference symbols (the recoverability invariant).
    """
    known = set(cond)
    changed = True
    while changed:
        changed = False
        for r in network.replicas:
            u, c = r
            x, y = VariableId("X", u, c), VariableId("Y", u, c)
            v = VariableId("V", u, c)
            wired = [VariableId("V", w[0], w[1]) for w in network.interferers_of(r)]
            if x in known and v not in known:
                known.add(v)
                changed = True
            if x in known and y not in known and all(w in known for w in wired):
                known.add(y)
                changed = True
            if x in known and y in known:
                for w in wired:
                    if w not in known:
                        known.add(w)
                        changed = True
    return known


def _enumerate_sources(network: NetworkGraph, dist: SourceDistribution, sources: list[Replica]):
    """Yield (x-assignment dict position, prob) over the given source replicas."""
    all_pos = {r: i for i, r in enumerate(network.replicas)}
    idx = [all_pos[r] for r in sources]
    if dist.mode == "product":
        supports = [dist.support(i) for i in idx]
        total = math.prod(len(s) for s in supports)
        if total > atom_budget():
            raise BudgetExceededError(
                f"{total} source atoms over {len(sources)} sources exceed the cap of {atom_budget()}"
            )
        for combo in product(*supports):
            yield tuple(s for s, _ in combo), math.prod(p for _, p in combo)
    else:
        marginal = dist.marginal_joint(idx)
        if len(marginal) > atom_budget():
            raise BudgetExceededError("joint support exceeds the atom cap")
        for key, p in marginal.items():
            if p > 0.0:
                yield key, p


def cond_entropy_network(
    network: NetworkGraph,
    dist: SourceDistribution,
    targets: Iterable[VariableId],
    cond: Iterable[VariableId] = (),
) -> float:
    """H(targets | cond) on the network without materializing the full joint.

    Fast path (product sources, every conditioned output accompanied by its
    own input): replace the conditioning by its X's plus the recovered
    interference symbols, then enumerate only the sources that still matter.
    """
    targets = set(targets)
    cond = set(cond)
    self_conditioned = all(
        VariableId("X", v.user, v.copy) in cond for v in cond if v.kind == "Y"
    )
    if dist.mode == "product" and self_conditioned:
        known = known_closure(network, cond)
        live = sorted(targets - known)
        if not live:
            return 0.0
        cond_x_sources = {(v.user, v.copy) for v in cond if v.kind == "X"}
        gen_v = sorted(
            v for v in known if v.kind == "V" and (v.user, v.copy) not in cond_x_sources
        )
        deps: set[Replica] = set()
        for v in list(live) + gen_v:
            deps |= network.dependencies(v)
        sources = sorted(deps)
        gen_x = sorted(VariableId("X", u, c) for (u, c) in deps & cond_x_sources)
        key_vars = gen_x + gen_v
        return _grouped_cond_entropy(network, dist, sources, live, key_vars)
    # general path: H(A u B) - H(B) over the dependency closure
    return _plain_entropy(network, dist, targets | cond) - _plain_entropy(network, dist, cond)


def _grouped_cond_entropy(network, dist, sources, live, key_vars):
    pos = {r: i for i, r in enumerate(sources)}
    joint: dict[tuple, float] = {}
    keys: dict[tuple, float] = {}
    for x, p in _enumerate_sources(network, dist, sources):
        key = tuple(network.value_of(v, x, pos) for v in key_vars)
        val = tuple(network.value_of(v, x, pos) for v in live)
        joint[key + val] = joint.get(key + val, 0.0) + p
        keys[key] = keys.get(key, 0.0) + p
    return _entropy_of_probs(joint.values()) - _entropy_of_probs(keys.values())


def _plain_entropy(network, dist, subset) -> float:
    subset = sorted(set(subset))
    if not subset:
        return 0.0
    deps: set[Replica] = set()
    for v in subset:
        deps |= network.dependencies(v)
    sources = sorted(deps)
    pos = {r: i for i, r in enumerate(sources)}
    merged: dict[tuple, float] = {}
    for x, p in _enumerate_sources(network, dist, sources):
        key = tuple(network.value_of(v, x, pos) for v in subset)
        merged[key] = merged.get(key, 0.0) + p
    return _entropy_of_probs(merged.values())


def network_entropy(network: NetworkGraph, dist: SourceDistribution, subset) -> float:
    return _plain_entropy(network, dist, set(subset))

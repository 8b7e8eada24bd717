"""Exact joint distributions over realized channel symbols and entropy queries.

Joint tables are support-sparse: atoms are keyed by source-input tuples only,
since every other symbol is a deterministic image.  All entropies are in bits.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .channels import DeterministicChannel
from .errors import BudgetExceededError, DicboundError, DistributionError

NORMALIZATION_TOL = 1e-9
DEFAULT_ATOM_BUDGET = 1 << 22

_VAR_RE = re.compile(r"^([XVY])(\d+)(?:\^(\d+))?$")


def atom_budget() -> int:
    """Source-atom cap, overridable through DICBOUND_BUDGET_ATOMS."""
    raw = os.environ.get("DICBOUND_BUDGET_ATOMS")
    if raw:
        try:
            return int(raw)
        except ValueError as exc:
            raise DicboundError(f"DICBOUND_BUDGET_ATOMS is not an integer: {raw!r}") from exc
    return DEFAULT_ATOM_BUDGET


@dataclass(frozen=True, order=True)
class VariableId:
    """One realized symbol: kind X (input), V (interference) or Y (output).

    owner is (user, copy); copy is 1 for base channels.
    """

    kind: str
    user: int
    copy: int = 1

    def __post_init__(self):
        if self.kind not in ("X", "V", "Y"):
            raise DicboundError(f"variable kind must be X, V or Y, got {self.kind!r}")

    def __str__(self):
        if self.copy == 1:
            return f"{self.kind}{self.user}"
        return f"{self.kind}{self.user}^{self.copy}"

    @classmethod
    def parse(cls, text: str) -> "VariableId":
        m = _VAR_RE.match(text.strip())
        if not m:
            raise DicboundError(f"cannot parse variable id {text!r}")
        kind, user, copy = m.groups()
        return cls(kind, int(user), int(copy) if copy else 1)


def X(user: int, copy: int = 1) -> VariableId:
    return VariableId("X", user, copy)


def V(user: int, copy: int = 1) -> VariableId:
    return VariableId("V", user, copy)


def Y(user: int, copy: int = 1) -> VariableId:
    return VariableId("Y", user, copy)


class SourceDistribution:
    """Distribution over the source inputs, either a product of per-source
    tables or one joint table over the source tuple."""

    def __init__(self, mode: str, sizes: Sequence[int], probs):
        if mode not in ("product", "joint"):
            raise DistributionError(f"mode must be product or joint, got {mode!r}")
        self.mode = mode
        self.sizes = tuple(int(s) for s in sizes)
        if mode == "product":
            tables = tuple(tuple(float(p) for p in t) for t in probs)
            if len(tables) != len(self.sizes):
                raise DistributionError("one probability table per source required")
            for size, table in zip(self.sizes, tables):
                if len(table) != size:
                    raise DistributionError(
                        f"table length {len(table)} does not match alphabet size {size}"
                    )
                self._check_table(table)
            self.tables = tables
            self.joint = None
        else:
            joint = {tuple(k): float(p) for k, p in probs.items()} if isinstance(probs, dict) else None
            if joint is None:
                # flat list over the full tuple space, row-major
                total = math.prod(self.sizes)
                flat = [float(p) for p in probs]
                if len(flat) != total:
                    raise DistributionError(
                        f"joint table length {len(flat)} does not match tuple space {total}"
                    )
                joint = {}
                for idx, p in enumerate(flat):
                    if p != 0.0:
                        key = []
                        rem = idx
                        for size in reversed(self.sizes):
                            key.append(rem % size)
                            rem //= size
                        joint[tuple(reversed(key))] = p
            for key, p in joint.items():
                if len(key) != len(self.sizes) or any(
                    not 0 <= s < size for s, size in zip(key, self.sizes)
                ):
                    raise DistributionError(f"joint atom {key} outside the source tuple space")
                if p < 0:
                    raise DistributionError(f"negative probability {p} at {key}")
            if abs(math.fsum(joint.values()) - 1.0) > NORMALIZATION_TOL:
                raise DistributionError("joint table does not sum to 1 within 1e-9")
            self.tables = None
            self.joint = dict(sorted(joint.items()))

    @staticmethod
    def _check_table(table):
        if any(p < 0 for p in table):
            raise DistributionError("negative probability entry")
        if abs(math.fsum(table) - 1.0) > NORMALIZATION_TOL:
            raise DistributionError("probability table does not sum to 1 within 1e-9")

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> "SourceDistribution":
        return cls("product", sizes, [[1.0 / s] * s for s in sizes])

    @classmethod
    def point_mass(cls, sizes: Sequence[int], point: Sequence[int]) -> "SourceDistribution":
        tables = []
        for size, value in zip(sizes, point):
            t = [0.0] * size
            t[value] = 1.0
            tables.append(t)
        return cls("product", sizes, tables)

    def support(self, index: int):
        """Nonzero symbols of one product factor as (symbol, prob) pairs."""
        if self.mode != "product":
            raise DistributionError("per-source support only defined for product mode")
        return [(s, p) for s, p in enumerate(self.tables[index]) if p > 0.0]

    def marginal_joint(self, indices: Sequence[int]) -> dict:
        """Joint table over a subset of sources (joint mode), summing others out."""
        out: dict[tuple[int, ...], float] = {}
        for key, p in self.joint.items():
            sub = tuple(key[i] for i in indices)
            out[sub] = out.get(sub, 0.0) + p
        return out


def distribution_from_dict(data: dict, sizes: Sequence[int]) -> SourceDistribution:
    mode = data.get("mode", "product")
    if mode == "product":
        return SourceDistribution("product", sizes, data["probs"])
    return SourceDistribution("joint", sizes, data["probs"])


@dataclass(frozen=True)
class JointTable:
    """Sparse joint distribution over an ordered variable list.

    Atoms are keyed by source inputs, so the atom count never exceeds the
    product of source alphabet sizes.
    """

    variables: tuple[VariableId, ...]
    atoms: tuple[tuple[tuple[int, ...], float], ...]

    def index_of(self, var: VariableId) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise DicboundError(f"unknown variable {var} in this table") from None


def _as_vars(subset: Iterable[VariableId | str]) -> tuple[VariableId, ...]:
    out = []
    for v in subset:
        out.append(VariableId.parse(v) if isinstance(v, str) else v)
    return tuple(sorted(set(out)))


def induce_joint(model, dist: SourceDistribution, budget: int | None = None) -> JointTable:
    """Materialize the joint table of all realized symbols.

    ``model`` is a DeterministicChannel (treated as its one-hop network) or a
    NetworkGraph.  Atom probabilities are exactly the source probabilities.
    """
    if isinstance(model, DeterministicChannel):
        from .networks import base_network

        model = base_network(model)
    sources = model.source_variables()
    if len(dist.sizes) != len(sources):
        raise DistributionError(
            f"distribution has {len(dist.sizes)} sources, network has {len(sources)}"
        )
    for size, var, expected in zip(dist.sizes, sources, model.source_sizes()):
        if size != expected:
            raise DistributionError(f"alphabet size mismatch for {var}: {size} != {expected}")
    cap = budget if budget is not None else atom_budget()
    variables = model.all_variables()
    atoms = []
    if dist.mode == "product":
        supports = [dist.support(i) for i in range(len(sources))]
        count = math.prod(len(s) for s in supports)
        if count > cap:
            raise BudgetExceededError(f"{count} source atoms exceed the cap of {cap}")
        for combo in product(*supports):
            x = tuple(s for s, _ in combo)
            p = math.prod(p for _, p in combo)
            atoms.append((model.realize(x), p))
    else:
        if len(dist.joint) > cap:
            raise BudgetExceededError(f"{len(dist.joint)} source atoms exceed the cap of {cap}")
        for x, p in dist.joint.items():
            atoms.append((model.realize(x), p))
    return JointTable(variables=variables, atoms=tuple(atoms))


def _merged_projection(table: JointTable, subset: tuple[VariableId, ...]) -> dict:
    idx = [table.index_of(v) for v in subset]
    merged: dict[tuple[int, ...], float] = {}
    for values, p in table.atoms:
        key = tuple(values[i] for i in idx)
        merged[key] = merged.get(key, 0.0) + p
    return merged


def _entropy_of_probs(probs: Iterable[float]) -> float:
    return -math.fsum(p * math.log2(p) for p in probs if p > 0.0)


def entropy(table: JointTable, subset: Iterable[VariableId | str]) -> float:
    """Shannon entropy in bits of the marginal on ``subset`` (0 log 0 = 0)."""
    vars_ = _as_vars(subset)
    if not vars_:
        return 0.0
    return _entropy_of_probs(_merged_projection(table, vars_).values())


def conditional_entropy(table: JointTable, a: Iterable, b: Iterable) -> float:
    """H(A | B) = H(A u B) - H(B)."""
    a_vars = _as_vars(a)
    b_vars = _as_vars(b)
    return entropy(table, a_vars + b_vars) - entropy(table, b_vars)


def mutual_information(table: JointTable, a: Iterable, b: Iterable) -> float:
    """I(A; B) = H(A) + H(B) - H(A u B); symmetric by construction."""
    a_vars = _as_vars(a)
    b_vars = _as_vars(b)
    return entropy(table, a_vars) + entropy(table, b_vars) - entropy(table, a_vars + b_vars)

"""Entropic-vector LP prover for conditional-entropy inequalities.

A target expression is Provable when it is a non-negative rational combination
of the elemental Shannon inequalities plus the channel's structural equalities
(interference = function of input, output = function of input and
interference, interference recoverable from input and output, independent
sources).  NotProvable means exactly that no such combination exists; the
inequality may still hold for reasons outside this system.

Search is float-guided (scipy) for speed, but every verdict rests on exact
rational arithmetic: Provable results carry a certificate that re-sums to the
target exactly, and NotProvable results are confirmed by an exact simplex run
(whose infeasibility certificate is checked by re-summation as well).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .entropy import VariableId
from .errors import ProverError, UnsupportedBoundError
from .exactlp import solve_feasibility
from .networks import NetworkGraph, network_entropy

MAX_VARIABLES = 12

Expr = dict[int, Fraction]  # subset bitmask -> coefficient


def _mask_name(mask: int, variables: Sequence[str]) -> str:
    return ",".join(v for i, v in enumerate(variables) if mask >> i & 1)


def expr_from_names(variables: Sequence[str], terms: Mapping[str, object]) -> Expr:
    """Build an expression from {"X1 V2": coeff} style entries."""
    index = {v: i for i, v in enumerate(variables)}
    expr: Expr = {}
    for names, coeff in terms.items():
        mask = 0
        for name in names.split():
            if name not in index:
                raise ProverError(f"expression references unknown variable {name!r}")
            mask |= 1 << index[name]
        if mask == 0:
            raise ProverError("expressions may not reference the empty set")
        coeff = Fraction(coeff)
        if coeff:
            expr[mask] = expr.get(mask, Fraction(0)) + coeff
    return {m: c for m, c in expr.items() if c}


def entropy_diff(variables: Sequence[str], a: Iterable[str], b: Iterable[str]) -> Expr:
    """H(a | b) as an expression: H(a u b) - H(b)."""
    index = {v: i for i, v in enumerate(variables)}
    mask_b = 0
    for name in b:
        mask_b |= 1 << index[name]
    mask_ab = mask_b
    for name in a:
        mask_ab |= 1 << index[name]
    expr: Expr = {mask_ab: Fraction(1)}
    if mask_b:
        expr[mask_b] = expr.get(mask_b, Fraction(0)) - 1
    return {m: c for m, c in expr.items() if c}


def expr_sub(x: Expr, y: Expr) -> Expr:
    out = dict(x)
    for m, c in y.items():
        out[m] = out.get(m, Fraction(0)) - c
    return {m: c for m, c in out.items() if c}


@dataclass(frozen=True)
class ProverProblem:
    """Variables, structural equalities, and a target claimed non-negative."""

    variables: tuple[str, ...]
    constraints: tuple[tuple[str, Expr], ...]
    target: Expr
    name: str = ""

    def __post_init__(self):
        n = len(self.variables)
        if n < 1:
            raise ProverError("a problem needs at least one variable")
        if n > MAX_VARIABLES:
            raise ProverError(f"{n} variables exceed the prover budget of {MAX_VARIABLES}")
        top = 1 << n
        for _, expr in list(self.constraints) + [("target", self.target)]:
            for mask in expr:
                if not 0 < mask < top:
                    raise ProverError(f"expression mask {mask} outside the variable set")

    def describe_expr(self, expr: Expr) -> str:
        parts = []
        for mask in sorted(expr):
            parts.append(f"{expr[mask]}*H({_mask_name(mask, self.variables)})")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ProofResult:
    status: str  # "Provable" | "NotProvable"
    certificate: tuple[tuple[str, Fraction], ...] | None
    message: str
    problem: "ProverProblem | None" = field(repr=False, default=None)

    @property
    def provable(self) -> bool:
        return self.status == "Provable"


def elemental_inequalities(n: int) -> list[tuple[str, Expr]]:
    """Generators of the polyhedral Shannon cone on n variables.

    Monotonicity H(all) - H(all minus one) and conditional mutual
    informations I(i;j|K); for n <= 2 the single-variable non-negativities
    are included as well (they are implied for larger n).
    """
    if n < 1:
        raise ProverError("n must be >= 1")
    names = [f"Z{i+1}" for i in range(n)]
    full = (1 << n) - 1
    out: list[tuple[str, Expr]] = []
    for i in range(n):
        rest = full & ~(1 << i)
        expr: Expr = {full: Fraction(1)}
        if rest:
            expr[rest] = Fraction(-1)
        label = f"H({names[i]}|{_mask_name(rest, names)})" if rest else f"H({names[i]})"
        out.append((label, expr))
    if n == 2:
        for i in range(n):
            out.append((f"H({names[i]})", {1 << i: Fraction(1)}))
    for i, j in combinations(range(n), 2):
        others = [t for t in range(n) if t not in (i, j)]
        for r in range(len(others) + 1):
            for ks in combinations(others, r):
                k_mask = 0
                for t in ks:
                    k_mask |= 1 << t
                expr = {}
                for mask, sign in (
                    ((1 << i) | k_mask, 1),
                    ((1 << j) | k_mask, 1),
                    ((1 << i) | (1 << j) | k_mask, -1),
                    (k_mask, -1),
                ):
                    if mask:
                        expr[mask] = expr.get(mask, Fraction(0)) + sign
                expr = {m: c for m, c in expr.items() if c}
                cond = f"|{_mask_name(k_mask, names)}" if k_mask else ""
                out.append((f"I({names[i]};{names[j]}{cond})", expr))
    return out


def _relabel(label: str, generic: Sequence[str], actual: Sequence[str]) -> str:
    for g, a in zip(generic, actual):
        label = label.replace(g, a)
    return label


def _elementals_for(variables: Sequence[str]) -> list[tuple[str, Expr]]:
    n = len(variables)
    generic = [f"Z{i+1}" for i in range(n)]
    return [(_relabel(lbl, generic, variables), expr) for lbl, expr in elemental_inequalities(n)]


def dic_constraints(
    user_count: int,
    replica_counts: Sequence[int],
    wiring: Mapping[tuple[int, int], tuple[tuple[int, int], ...]],
) -> tuple[tuple[str, ...], tuple[tuple[str, Expr], ...]]:
    """Structural equalities of a (possibly replicated) channel network.

    Per receiver: V is a function of X; Y is a function of (X, wired V's);
    the wired V's are recoverable from (X, Y); Y is a function of all inputs.
    Plus one joint source-independence equality.
    """
    if user_count not in (2, 3) or len(replica_counts) != user_count:
        raise ProverError("replica_counts must list one positive count per user")
    replicas = [
        (u + 1, c) for u in range(user_count) for c in range(1, replica_counts[u] + 1)
    ]
    variables = tuple(
        str(VariableId(kind, u, c)) for u, c in replicas for kind in ("X", "V", "Y")
    )

    def var(kind, r):
        return str(VariableId(kind, r[0], r[1]))

    constraints: list[tuple[str, Expr]] = []
    all_x = [var("X", r) for r in replicas]
    for r in replicas:
        wired = wiring[r]
        x, v, y = var("X", r), var("V", r), var("Y", r)
        wired_v = [var("V", w) for w in wired]
        constraints.append((f"H({v}|{x})=0", entropy_diff(variables, [v], [x])))
        constraints.append(
            (
                f"H({y}|{x},{','.join(wired_v)})=0",
                entropy_diff(variables, [y], [x] + wired_v),
            )
        )
        constraints.append(
            (
                f"H({','.join(wired_v)}|{x},{y})=0",
                entropy_diff(variables, wired_v, [x, y]),
            )
        )
        constraints.append((f"H({y}|inputs)=0", entropy_diff(variables, [y], all_x)))
    constraints.append(("independent sources", _independence_expr(variables, all_x)))
    return variables, tuple(constraints)


def _independence_expr(variables: Sequence[str], roots: Sequence[str]) -> Expr:
    index = {v: i for i, v in enumerate(variables)}
    expr: Expr = {}
    joint = 0
    for r in roots:
        joint |= 1 << index[r]
        mask = 1 << index[r]
        expr[mask] = expr.get(mask, Fraction(0)) - 1
    if len(roots) > 1:
        expr[joint] = expr.get(joint, Fraction(0)) + 1
    return {m: c for m, c in expr.items() if c}


# -- solving -------------------------------------------------------------------


def _certificate_sum(
    columns: Mapping[str, Expr], certificate: Iterable[tuple[str, Fraction]]
) -> Expr:
    total: Expr = {}
    for label, coeff in certificate:
        for mask, c in columns[label].items():
            total[mask] = total.get(mask, Fraction(0)) + coeff * c
    return {m: c for m, c in total.items() if c}


def verify_certificate(problem: ProverProblem, certificate) -> bool:
    """Exact re-summation: the combination must equal the target, with
    non-negative weights on the inequality generators."""
    columns = dict(_elementals_for(problem.variables))
    for label, expr in problem.constraints:
        columns[f"[=]{label}"] = expr
    for label, coeff in certificate:
        if not label.startswith("[=]") and coeff < 0:
            return False
        if label not in columns:
            return False
    return _certificate_sum(columns, certificate) == problem.target


def _separating_vector_checks(farkas, columns, target_vec) -> bool:
    """Exact Farkas check for a NotProvable verdict: the dual vector must be
    non-positive against every generator column (hence zero against the
    equality pairs) and strictly positive against the target."""
    if farkas is None:
        return False
    for col in columns:
        if sum((farkas.get(i, Fraction(0)) * c for i, c in col.items()), Fraction(0)) > 0:
            return False
    against_target = sum(
        (farkas.get(i, Fraction(0)) * c for i, c in target_vec.items()), Fraction(0)
    )
    return against_target > 0


def _solve_exact(problem, labels, columns, target_vec, n_rows, restrict=None):
    if restrict is None:
        cols = list(range(len(columns)))
    else:
        cols = sorted(restrict)
    result = solve_feasibility([columns[j] for j in cols], target_vec, n_rows)
    if not result.feasible:
        return None, result
    certificate = tuple(
        (labels[cols[j]], coeff) for j, coeff in sorted(result.solution.items())
    )
    return certificate, result


def prove(problem: ProverProblem, method: str = "auto") -> ProofResult:
    """Decide Shannon-derivability of the target under the constraints."""
    n = len(problem.variables)
    n_rows = (1 << n) - 1
    labels: list[str] = []
    columns: list[dict[int, Fraction]] = []
    for label, expr in _elementals_for(problem.variables):
        labels.append(label)
        columns.append({m - 1: c for m, c in expr.items()})
    n_elemental = len(columns)
    for label, expr in problem.constraints:
        for sign in (1, -1):
            labels.append(f"[=]{label}" if sign == 1 else f"[=]-({label})")
            columns.append({m - 1: sign * c for m, c in expr.items()})
    target_vec = {m - 1: c for m, c in problem.target.items()}

    certificate = None
    if method == "auto":
        support = _float_support(columns, target_vec, n_rows)
        if support is not None:
            certificate, _ = _solve_exact(
                problem, labels, columns, target_vec, n_rows, restrict=support
            )
            if certificate is None:
                widened = set(support) | set(range(n_elemental, len(columns)))
                certificate, _ = _solve_exact(
                    problem, labels, columns, target_vec, n_rows, restrict=widened
                )
    if certificate is None:
        certificate, result = _solve_exact(problem, labels, columns, target_vec, n_rows)
        if certificate is None and not _separating_vector_checks(
            result.farkas, columns, target_vec
        ):
            raise ProverError(
                f"internal error: infeasibility certificate for {problem.name} fails its checks"
            )
    if certificate is not None:
        # normalize: merge the +/- columns of each equality into one signed entry
        merged: dict[str, Fraction] = {}
        for label, coeff in certificate:
            if label.startswith("[=]-("):
                merged_label = "[=]" + label[len("[=]-(") : -1]
                merged[merged_label] = merged.get(merged_label, Fraction(0)) - coeff
            else:
                merged[label] = merged.get(label, Fraction(0)) + coeff
        cert = tuple((l, c) for l, c in merged.items() if c)
        if not verify_certificate(problem, cert):
            raise ProverError(f"internal error: certificate for {problem.name} fails re-summation")
        return ProofResult(
            status="Provable",
            certificate=cert,
            message=f"target {problem.describe_expr(problem.target)} is a non-negative "
            "combination of elemental inequalities and constraints",
            problem=problem,
        )
    return ProofResult(
        status="NotProvable",
        certificate=None,
        message="not derivable from Shannon-type inequalities plus the given "
        "constraints; the inequality may still hold",
        problem=problem,
    )


def _float_support(columns, target_vec, n_rows) -> set[int] | None:
    """Feasible support suggested by a floating LP, or None when it reports
    infeasibility (the exact solver then has the final word)."""
    n_cols = len(columns)
    data, rows_idx, cols_idx = [], [], []
    for j, col in enumerate(columns):
        for i, c in col.items():
            rows_idx.append(i)
            cols_idx.append(j)
            data.append(float(c))
    a_eq = sparse.csc_matrix((data, (rows_idx, cols_idx)), shape=(n_rows, n_cols))
    b_eq = np.zeros(n_rows)
    for i, c in target_vec.items():
        b_eq[i] = float(c)
    # minimizing the weight total keeps the support sparse; the interior-point
    # solver (with its default crossover) is far faster than simplex here
    res = linprog(
        c=np.ones(n_cols),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs-ipm",
    )
    if not res.success:
        return None
    return {j for j, x in enumerate(res.x) if x > 1e-9}


# -- numeric evaluation of prover expressions -----------------------------------


def evaluate_expr(
    expr: Expr, variables: Sequence[str], network: NetworkGraph, dist
) -> float:
    """Evaluate a linear entropy expression on a concrete network."""
    ids = [VariableId.parse(v) for v in variables]
    total = 0.0
    for mask, coeff in expr.items():
        subset = [ids[i] for i in range(len(ids)) if mask >> i & 1]
        total += float(coeff) * network_entropy(network, dist, subset)
    return total


# -- per-bound residue problems --------------------------------------------------


def appendix_targets(bound_id: str) -> list[ProverProblem]:
    """Single-letter residue inequalities for the bound's cut chain.

    For every chain term with non-empty conditioning, the claim is
    H(Y_target | V-copies pinned down) - H(Y_target | pinning inputs/outputs)
    >= 0, over just the replicas that step touches.
    """
    from .extend import bound_support_info, builtin_recipe

    spec = bound_support_info(bound_id)
    if spec["parametric"]:
        k = 2 if spec["users"] == 2 else 1
        recipe = builtin_recipe(bound_id, k)
    else:
        recipe = builtin_recipe(bound_id)
    wiring = recipe.recipe.wiring_map()
    problems = []
    for term in recipe.closed_terms:
        if not term.evidence:
            continue  # unconditioned opening term
        target = term.target

        def copy_of(user):
            if user == target[0]:
                return target
            return next(w for w in wiring[target] if w[0] == user)

        replica_vars: dict[tuple[int, int], set[str]] = {}

        def touch(r, kinds):
            replica_vars.setdefault(r, set()).update(kinds)

        touch(target, {"X", "Y"})
        for w in wiring[target]:
            touch(w, {"V"})
        if target[0] in term.given:
            touch(target, {"V"})
        # each evidence receiver contributes its (input, output) pair and pins
        # exactly the interference copies this step conditions on
        cond_names: list[str] = []
        pinned: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for user, (how, r) in term.evidence:
            if how == "peeled":
                touch(r, {"X", "V"})
                cond_names.append(str(VariableId("X", r[0], r[1])))
            else:
                touch(r, {"X", "Y"})
                pinned.setdefault(r, []).append(copy_of(user))
        for r in sorted(pinned):
            cond_names.append(str(VariableId("X", r[0], r[1])))
            cond_names.append(str(VariableId("Y", r[0], r[1])))
        order = sorted(replica_vars)
        variables = []
        for r in order:
            for kind in ("X", "V", "Y"):
                if kind in replica_vars[r]:
                    variables.append(str(VariableId(kind, r[0], r[1])))
        variables = tuple(variables)
        present = set(variables)

        constraints: list[tuple[str, Expr]] = []
        for r in order:
            x = str(VariableId("X", r[0], r[1]))
            v = str(VariableId("V", r[0], r[1]))
            y = str(VariableId("Y", r[0], r[1]))
            if x in present and v in present:
                constraints.append((f"H({v}|{x})=0", entropy_diff(variables, [v], [x])))
            if y in present and x in present:
                wired_v = [str(VariableId("V", w[0], w[1])) for w in wiring[r]]
                if all(wv in present for wv in wired_v):
                    constraints.append(
                        (
                            f"H({y}|{x},{','.join(wired_v)})=0",
                            entropy_diff(variables, [y], [x] + wired_v),
                        )
                    )
                    constraints.append(
                        (
                            f"H({','.join(wired_v)}|{x},{y})=0",
                            entropy_diff(variables, wired_v, [x, y]),
                        )
                    )
                elif r in pinned:
                    names = [str(VariableId("V", c[0], c[1])) for c in sorted(set(pinned[r]))]
                    constraints.append(
                        (
                            f"H({','.join(names)}|{x},{y})=0",
                            entropy_diff(variables, names, [x, y]),
                        )
                    )
        roots = []
        for r in order:
            x = str(VariableId("X", r[0], r[1]))
            v = str(VariableId("V", r[0], r[1]))
            if x in present:
                roots.append(x)
            elif v in present:
                roots.append(v)
        if len(roots) > 1:
            constraints.append(("independent sources", _independence_expr(variables, roots)))

        y_t = str(VariableId("Y", target[0], target[1]))
        given_copies = [
            str(VariableId("V", c[0], c[1]))
            for c in (copy_of(u) for u in sorted(term.given))
        ]
        closed_expr = entropy_diff(variables, [y_t], given_copies)
        chain_expr = entropy_diff(variables, [y_t], cond_names)
        problems.append(
            ProverProblem(
                variables=variables,
                constraints=tuple(constraints),
                target=expr_sub(closed_expr, chain_expr),
                name=f"{bound_id} level {term.level}: "
                f"{term.describe()} dominates the chain term",
            )
        )
    if not problems:
        raise UnsupportedBoundError(f"bound {bound_id} has no conditioned chain terms")
    return problems

"""Command-line entry point.

Subcommands: validate, region, gcs, extend, prove, compare.  Runs are
reproducible: all sampling derives from --seed through per-index stream
splitting, and CSV/text output is byte-stable for identical configurations.

Exit codes: 0 success, 1 validation/verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .channels import load_channel, validate_channel
from .entropy import SourceDistribution, distribution_from_dict
from .errors import DicboundError, UsageError
from .extend import (
    bound_support_info,
    build_extended,
    builtin_recipe,
    chain_closed_form,
    limit_bound,
    recipe_chain,
    recipe_from_dict,
    supported_bounds,
    verify_chain_identity,
    verify_replica_rates,
)
from .gcs import CutChain, enumerate_chains, evaluate_chain, min_chain_bound, validate_chain
from .networks import base_network, replicate_distribution
from .prover import ProverProblem, appendix_targets, expr_from_names, prove
from .regions import (
    bound_vector,
    load_templates,
    region_polytope,
    render_region_svg,
    sample_region,
)
from .sampling import sample_product_distribution

USAGE_ERROR = 2
VERIFY_ERROR = 1


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _resolve_channel(ref: str):
    try:
        return load_channel(ref)
    except (DicboundError, OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load channel {ref!r}: {exc}") from exc


def _resolve_dist(ref: str, sizes, seed: int) -> SourceDistribution:
    if ref == "uniform":
        return SourceDistribution.uniform(sizes)
    if ref.startswith("seed:"):
        return sample_product_distribution(sizes, int(ref.split(":", 1)[1]), 0)
    try:
        with open(ref, "r", encoding="utf-8") as fh:
            return distribution_from_dict(json.load(fh), sizes)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot load distribution {ref!r}: {exc}") from exc


def _parse_k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_validate(args) -> int:
    channel = _resolve_channel(args.channel)
    report = validate_channel(channel)
    if report.valid:
        print(f"channel {args.channel}: valid (interference recoverable at every receiver)")
        return 0
    print(f"channel {args.channel}: INVALID (interference-recoverability violations)")
    for user, x, group in report.violations:
        tuples = "; ".join(str(t) for t in group)
        print(f"  user {user}, input {x}: colliding interference tuples {tuples}")
    return VERIFY_ERROR


def cmd_region(args) -> int:
    channel = _resolve_channel(args.channel)
    templates = load_templates(channel.user_count)
    if args.samples is not None:
        family = sample_region(channel, args.seed, args.samples, templates)
        if args.out == "svg":
            if channel.user_count != 2:
                raise DicboundError("SVG output is limited to 2-user regions")
            sys.stdout.write(render_region_svg(family.polytopes))
            return 0
        print("sample,template,rhs_bits")
        for s, poly in enumerate(family.polytopes):
            for t, (_, rhs) in zip(templates, poly.halfspaces):
                print(f"{s},{t.id},{_fmt(rhs)}")
        return 0
    dist = _resolve_dist(args.dist, channel.input_sizes, args.seed)
    vector = bound_vector(channel, dist, templates)
    if args.out == "svg":
        if channel.user_count != 2:
            raise DicboundError("SVG output is limited to 2-user regions")
        sys.stdout.write(render_region_svg([region_polytope(vector, templates)]))
        return 0
    print("template,rhs_bits")
    for bound_id, value in vector:
        print(f"{bound_id},{_fmt(value)}")
    return 0


def _load_network(args):
    if args.network:
        with open(args.network, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        channel = _resolve_channel(args.channel) if args.channel else None
        if channel is None:
            from .channels import channel_from_dict

            channel = channel_from_dict(doc["channel"])
        return build_extended(channel, recipe_from_dict(doc["recipe"]))
    if not args.channel:
        raise DicboundError("either --channel or --network is required")
    return base_network(_resolve_channel(args.channel))


def cmd_gcs(args) -> int:
    network = _load_network(args)
    sizes = network.source_sizes()
    dist = _resolve_dist(args.dist, sizes, args.seed)
    if args.enumerate:
        chains = enumerate_chains(network, args.max_l)
        print(f"valid chains up to length {args.max_l}: {len(chains)}")
        for chain in chains:
            value = evaluate_chain(network, chain, dist).total
            subsets = " >= ".join("{" + ",".join(s) + "}" for s in chain.canonical())
            print(f"{_fmt(value)}  {subsets}")
        chain, best = min_chain_bound(network, dist, args.max_l)
        print(f"tightest: {_fmt(best)} via {[sorted(s) for s in chain.subsets]}")
        return 0
    if not args.chain:
        raise DicboundError("--chain FILE or --enumerate is required")
    with open(args.chain, "r", encoding="utf-8") as fh:
        chain = CutChain.of(json.load(fh))
    violations = validate_chain(network, chain)
    if violations:
        print("invalid chain:")
        for v in violations:
            print(f"  {v}")
        return VERIFY_ERROR
    value = evaluate_chain(network, chain, dist)
    for idx, term in enumerate(value.terms, start=1):
        print(f"term {idx}: {_fmt(term)}")
    print(f"total: {_fmt(value.total)}")
    return 0


def cmd_extend(args) -> int:
    channel = _resolve_channel(args.channel)
    dist = _resolve_dist(args.dist, channel.input_sizes, args.seed)
    spec = bound_support_info(args.bound)
    ks = _parse_k_range(args.k) if args.k else ([1, 2, 3] if spec["parametric"] else [None])
    failures = 0
    if args.verify:
        report = verify_chain_identity(args.bound, channel, dist, k_range=ks)
        for k, chain_v, closed_v, diff in report.per_k:
            tag = f"k={k}" if spec["parametric"] else "fixed size"
            print(
                f"{args.bound} {tag}: chain {_fmt(chain_v)}, closed form {_fmt(closed_v)}, "
                f"|diff| {diff:.2e}"
            )
        for inc in report.increments:
            print(f"increment: {_fmt(inc)}")
        for diag in report.diagnostics:
            print(f"MISMATCH {diag}")
        recipe0 = builtin_recipe(args.bound, ks[0] if spec["parametric"] else None)
        rates = verify_replica_rates(channel, recipe0.recipe, dist)
        print(f"replica rate deviation: {rates.max_deviation:.2e}")
        weights, bits = limit_bound(args.bound, channel, dist)
        print(f"limit: {'+'.join(f'{w}R{u+1}' for u, w in enumerate(weights) if w)} <= {_fmt(bits)}")
        failures += 0 if report.ok else 1
    else:
        for k in ks:
            recipe = builtin_recipe(args.bound, k)
            network = build_extended(channel, recipe.recipe)
            chain = recipe_chain(recipe, network)
            value = evaluate_chain(network, chain, replicate_distribution(network, dist))
            closed = chain_closed_form(recipe, channel, dist)
            tag = f"k={k}" if spec["parametric"] else "fixed size"
            print(f"{args.bound} {tag}: chain {_fmt(value.total)}, closed form {_fmt(closed)}")
    return VERIFY_ERROR if failures else 0


def cmd_prove(args) -> int:
    if args.problem:
        with open(args.problem, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        variables = tuple(doc["variables"])
        constraints = tuple(
            (c.get("name", f"constraint {i}"), expr_from_names(variables, c["expr"]))
            for i, c in enumerate(doc.get("constraints", []), start=1)
        )
        problems = [
            ProverProblem(
                variables=variables,
                constraints=constraints,
                target=expr_from_names(variables, doc["target"]),
                name=doc.get("name", args.problem),
            )
        ]
    else:
        problems = appendix_targets(args.bound)
    failures = 0
    for problem in problems:
        result = prove(problem)
        print(f"{problem.name or 'problem'}: {result.status}")
        if result.certificate:
            for label, coeff in result.certificate:
                print(f"  {coeff} * {label}")
        else:
            print(f"  {result.message}")
            failures += 1
    return VERIFY_ERROR if failures else 0


def cmd_compare(args) -> int:
    channel = _resolve_channel(args.channel)
    bounds = [b for b in supported_bounds(channel.user_count)]
    print("dist,bound,direct_bound_bits,chain_limit_bits,abs_diff")
    for index in range(args.samples):
        dist = (
            SourceDistribution.uniform(channel.input_sizes)
            if index == 0
            else sample_product_distribution(channel.input_sizes, args.seed, index - 1)
        )
        vector = bound_vector(channel, dist)
        for bound_id in bounds:
            _, bits = limit_bound(bound_id, channel, dist)
            diff = abs(bits - vector[bound_id])
            print(f"{index},{bound_id},{_fmt(vector[bound_id])},{_fmt(bits)},{diff:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicbound",
        description="Outer bounds for deterministic interference channels: "
        "rate regions, cut-chain bounds on replicated networks, and a "
        "Shannon-inequality prover.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel's interference recoverability")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("region", help="evaluate rate-region bounds")
    p.add_argument("--channel", required=True)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", choices=["csv", "svg"], default="csv")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("gcs", help="validate/evaluate cut chains on a network")
    p.add_argument("--channel")
    p.add_argument("--network", help="JSON file with channel and replication recipe")
    p.add_argument("--dist", default="uniform")
    p.add_argument("--chain", help="JSON file: list of node-label lists")
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--max-l", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gcs)

    p = sub.add_parser("extend", help="build replicated networks and verify chain identities")
    p.add_argument("--bound", required=True)
    p.add_argument("--k", help="size or range, e.g. 3 or 1..5")
    p.add_argument("--channel", required=True)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("prove", help="prove per-bound residue inequalities or a problem file")
    p.add_argument("--bound")
    p.add_argument("--problem")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("compare", help="chain-limit bounds vs direct rate bounds over a sweep")
    p.add_argument("--channel", required=True)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "prove" and bool(args.bound) == bool(args.problem):
        parser.error("prove needs exactly one of --bound or --problem")
    try:
        if args.command == "prove" and args.bound:
            from .errors import UnsupportedBoundError

            try:
                bound_support_info(args.bound)
            except UnsupportedBoundError as exc:
                print(f"usage error: {exc}", file=sys.stderr)
                return USAGE_ERROR
        return args.func(args)
    except (UsageError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except DicboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VERIFY_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""The ``fm`` command line tool.

One binary, many subcommands; every run writes a JSON report to stdout
(sorted keys, no timestamps) so identical invocations produce identical
bytes.  Exit codes: 0 success, 1 a property violation or counterexample
was found, 2 usage or input error, 3 a work budget ran out.

The evaluation budget can be overridden with the ``FM_EVAL_BUDGET``
environment variable or, per run, the ``--budget`` flag.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .combinatorics import (
    free_set,
    is_delta_system,
    is_free,
    is_maximal_for_kernel,
    make_family,
    max_sunflower,
    trace_kernel_sunflower,
)
from .corpus import generate_corpus
from .decompose import (
    PROPERTIES,
    chain_slices,
    check_bond_faithful,
    search_bond_faithful,
    slice_partition_check,
    well_reflecting_probe,
)
from .graph import (
    bridges,
    cycle_double_cover_search,
    edge_connectivity,
    edge_disjoint_paths,
    enumerate_bonds,
    is_cycle,
    is_decomposition,
    odd_cut_witness,
    veblen_decomposition,
)
from .hull import PACKS, chain as build_chain, get_pack, hull as build_hull, verify_hull
from .oracles import (
    bond_faithful_by_definition,
    bonds_by_definition,
    bridges_by_deletion,
    edge_connectivity_brute,
    max_sunflower_by_kernels,
)
from .formula import (
    ParseError,
    formula_to_json,
    free_vars,
    pack_from_json,
    parse,
    relativize,
    render,
    subformula_closure,
)
from .serialize import (
    canonical_dumps,
    graph_from_edge_list,
    graph_from_json,
    graph_to_dot,
    graph_to_json,
    structure_from_json,
    structure_from_matrix,
)
from .structure import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    EvalError,
    eval_formula,
    eval_relativized,
    is_sigma_elementary,
)
from .universe import build_hierarchy, hf_rank, hf_repr

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

SCHEMA = "fm-report/1"


class InputError(Exception):
    pass


def _budget(args) -> int:
    if getattr(args, "budget", None):
        return int(args.budget)
    env = os.environ.get("FM_EVAL_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON in {path}: {exc}")


def _load_structure(path: str):
    if path.endswith(".txt"):
        try:
            return structure_from_matrix(Path(path).read_text())
        except FileNotFoundError:
            raise InputError(f"no such file: {path}")
    return structure_from_json(_load_json(path))


def _load_graph(path: str):
    if path.endswith(".txt"):
        try:
            return graph_from_edge_list(Path(path).read_text())
        except FileNotFoundError:
            raise InputError(f"no such file: {path}")
    return graph_from_json(_load_json(path))


def _load_pack(spec: str):
    """A comma-separated list of shipped pack names, or a JSON file."""
    names = [n.strip() for n in spec.split(",") if n.strip()]
    if names and all(n in PACKS for n in names):
        return get_pack(names)
    pack = pack_from_json(_load_json(spec))
    if not pack.closed_under_subformulas:
        pack = subformula_closure(pack)
    return pack


def _ints(text: str) -> list[int]:
    if not text:
        return []
    return [int(part) for part in text.split(",") if part != ""]


def _valuation(text: str | None) -> dict[str, int]:
    if not text:
        return {}
    obj = json.loads(text)
    return {str(k): int(v) for k, v in obj.items()}


def _edges_json(edges) -> list[list[int]]:
    return sorted([u, v] for u, v in edges)


# ---------------------------------------------------------------------------
# handlers: each returns (exit_code, result dict)


def cmd_parse(args):
    phi = parse(args.formula)
    return EXIT_OK, {
        "formula": formula_to_json(phi),
        "rendered": render(phi),
        "free_vars": free_vars(phi),
    }


def cmd_eval(args):
    N = _load_structure(args.structure)
    phi = parse(args.formula)
    valuation = _valuation(args.valuation)
    if args.relativize_to is not None:
        subset = _ints(args.relativize_to)
        value = eval_relativized(N, subset, relativize(phi), valuation, _budget(args))
    else:
        value = eval_formula(N, phi, valuation, _budget(args))
    return EXIT_OK, {"value": value}


def cmd_relativize(args):
    phi = relativize(parse(args.formula))
    return EXIT_OK, {"formula": formula_to_json(phi), "rendered": render(phi)}


def cmd_universe_dump(args):
    h = build_hierarchy(args.rank, allow_rank5=args.allow_rank5)
    limit = args.limit if args.limit is not None else h.size
    rows = [
        {"code": str(code), "rank": hf_rank(code), "set": hf_repr(code)}
        for code in range(min(limit, h.size))
    ]
    return EXIT_OK, {"rank": args.rank, "size": h.size, "elements": rows}


def _hull_json(N, pack, h):
    return {
        "seed": sorted(h.seed),
        "carrier": sorted(h.carrier),
        "trace": [
            {
                "formula": render(step.formula),
                "valuation": {k: v for k, v in step.valuation},
                "witness": step.witness,
            }
            for step in h.trace
        ],
        "stats": {
            "seed_size": len(h.seed),
            "carrier_size": len(h.carrier),
            "growth": len(h.carrier) - len(h.seed),
        },
    }


def cmd_hull(args):
    N = _load_structure(args.structure)
    pack = _load_pack(args.pack)
    h = build_hull(N, pack, _ints(args.seed_elems), _budget(args))
    result = _hull_json(N, pack, h)
    if args.validate:
        check = is_sigma_elementary(h.carrier, N, pack, _budget(args))
        result["validated"] = bool(check) and verify_hull(N, pack, h, _budget(args))
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def cmd_chain(args):
    N = _load_structure(args.structure)
    pack = _load_pack(args.pack)
    cover = list(range(N.size)) if args.cover_elems == "all" else _ints(args.cover_elems)
    ch = build_chain(N, pack, _ints(args.seed_elems), cover, _budget(args))
    result = {
        "stages": [sorted(s) for s in ch.stages],
        "records": [
            {
                "added_cover_element": r.added_cover_element,
                "self_encoding": r.self_encoding,
                "witnesses_added": len(r.trace),
            }
            for r in ch.records
        ],
        "coherent": ch.coherent,
    }
    if args.validate:
        checks = [
            bool(is_sigma_elementary(stage, N, pack, _budget(args)))
            for stage in ch.stages
        ]
        result["validated"] = all(checks)
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def cmd_slice(args):
    G = _load_graph(args.graph)
    stages = [set(map(int, stage)) for stage in _load_json(args.stages)]
    sliced = chain_slices(G, stages)
    partition = slice_partition_check(sliced)
    result = {
        "slices": [graph_to_json(s) for s in sliced.slices],
        "stage_coherent": list(sliced.stage_coherent),
        "covers_host": sliced.covers_host,
        "partition": partition,
    }
    if args.format == "dot":
        return EXIT_OK, graph_to_dot(G, sliced.slices)
    code = EXIT_OK
    if sliced.all_coherent and sliced.covers_host and not partition:
        code = EXIT_VIOLATION
    return code, result


def cmd_probe(args):
    if args.corpus:
        graphs = generate_corpus(_load_json(args.corpus))
    else:
        graphs = [_load_graph(args.graph)]
    pack = _load_pack(args.pack)
    report = well_reflecting_probe(
        graphs, pack, args.property,
        allow_rank5=args.allow_rank5, budget=_budget(args), workers=args.workers,
    )
    result = {
        "property": report.property_name,
        "pack": report.pack_name,
        "instances": [
            {
                "index": inst.index,
                "status": inst.status,
                "pass": inst.clean,
                "rank": inst.rank,
                "candidates_tested": inst.candidates_tested,
                "counterexamples": [
                    {
                        "subset": list(c.subset),
                        "piece": c.piece,
                        "witness": c.witness,
                    }
                    for c in inst.counterexamples
                ],
            }
            for inst in report.instances
        ],
        "counterexample_count": report.counterexample_count,
    }
    code = EXIT_VIOLATION if report.counterexample_count else EXIT_OK
    return code, result


def cmd_graph_bonds(args):
    G = _load_graph(args.graph)
    bonds = enumerate_bonds(G, max_size=args.max_size)
    result = {"bonds": [_edges_json(b) for b in bonds]}
    if args.validate:
        expected = bonds_by_definition(G)
        if args.max_size is not None:
            expected = [b for b in expected if len(b) <= args.max_size]
        want = sorted(sorted(map(list, b)) for b in expected)
        got = sorted(sorted(map(list, b)) for b in bonds)
        result["validated"] = want == got
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def cmd_graph_gamma(args):
    G = _load_graph(args.graph)
    value = edge_connectivity(G, args.x, args.y)
    result = {"gamma": value}
    if args.paths:
        paths = edge_disjoint_paths(G, args.x, args.y, args.paths)
        result["paths"] = paths
    if args.validate:
        result["validated"] = value == edge_connectivity_brute(G, args.x, args.y)
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def cmd_graph_nw(args):
    G = _load_graph(args.graph)
    witness = odd_cut_witness(G, mode=args.mode)
    if witness is None:
        return EXIT_OK, {"nw": True, "odd_cut": None}
    return EXIT_VIOLATION, {
        "nw": False,
        "odd_cut": {"side": sorted(witness.side), "edges": _edges_json(witness.edges)},
    }


def cmd_graph_veblen(args):
    G = _load_graph(args.graph)
    outcome = veblen_decomposition(G)
    if not outcome.ok:
        return EXIT_VIOLATION, {"decomposable": False, "odd_vertex": outcome.odd_vertex}
    parts = outcome.decomposition.parts
    result = {"decomposable": True, "cycles": [_edges_json(p.edges) for p in parts]}
    if args.validate:
        result["validated"] = is_decomposition(G, parts) and all(
            is_cycle(p) for p in parts
        )
        if not result["validated"]:
            return EXIT_VIOLATION, result
    if args.format == "dot":
        return EXIT_OK, graph_to_dot(G, parts)
    return EXIT_OK, result


def cmd_graph_bridges(args):
    G = _load_graph(args.graph)
    found = bridges(G)
    result = {"bridges": [_edges_json([e])[0] for e in found]}
    if args.validate:
        result["validated"] = found == bridges_by_deletion(G)
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def cmd_graph_dcc(args):
    G = _load_graph(args.graph)
    outcome = cycle_double_cover_search(G, budget=args.search_budget)
    result = {"status": outcome.status}
    if outcome.status == "found":
        result["cycles"] = [_edges_json(c) for c in outcome.cycles]
        return EXIT_OK, result
    if outcome.status == "budget-exhausted":
        return EXIT_BUDGET, result
    return EXIT_VIOLATION, result


def cmd_bondfaithful_check(args):
    G = _load_graph(args.graph)
    parts = [graph_from_json(p) for p in _load_json(args.parts)]
    report = check_bond_faithful(G, parts, args.kappa)
    result = _bond_report_json(report)
    if args.validate:
        result["validated"] = report.verdict == bond_faithful_by_definition(
            G, parts, args.kappa
        )
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return (EXIT_OK if report.verdict else EXIT_VIOLATION), result


def _bond_report_json(report):
    return {
        "kappa": report.kappa,
        "verdict": report.verdict,
        "size_ok": report.size_ok,
        "containment_ok": report.containment_ok,
        "bond_preservation_ok": report.bond_preservation_ok,
        "oversized_members": list(report.oversized_members),
        "split_bonds": [_edges_json(b) for b in report.split_bonds],
        "foreign_bonds": [
            {"member": i, "bond": _edges_json(b)} for i, b in report.foreign_bonds
        ],
        "sampled": report.sampled,
    }


def cmd_bondfaithful_search(args):
    G = _load_graph(args.graph)
    outcome = search_bond_faithful(G, args.kappa, budget=args.search_budget)
    result = {"status": outcome.status}
    if outcome.status == "found":
        result["parts"] = [graph_to_json(p) for p in outcome.decomposition.parts]
        result["report"] = _bond_report_json(outcome.report)
        if args.format == "dot":
            return EXIT_OK, graph_to_dot(G, outcome.decomposition.parts)
        return EXIT_OK, result
    if outcome.status == "budget-exhausted":
        return EXIT_BUDGET, result
    return EXIT_VIOLATION, result


def _load_family(path: str):
    return make_family(_load_json(path))


def cmd_sunflower(args):
    family = _load_family(args.family)
    if args.action == "find":
        kernel = is_delta_system(family)
        return EXIT_OK, {
            "is_delta_system": kernel is not None,
            "kernel": sorted(kernel) if kernel is not None else None,
        }
    if args.action == "max":
        system = max_sunflower(family, args.petals)
        if system is None:
            return EXIT_VIOLATION, {"found": False}
        result = _system_json(system)
        if args.validate:
            other = max_sunflower_by_kernels(family)
            result["validated"] = other.indices == system.indices
            if not result["validated"]:
                return EXIT_VIOLATION, result
        return EXIT_OK, result
    m_obj = _load_json(args.m) if args.m else {"elements": [], "members": []}
    mset: set = set(int(x) for x in m_obj.get("elements", []))
    for idx in m_obj.get("members", []):
        mset.add(family.sets[int(idx)])
    system = trace_kernel_sunflower(family, mset)
    result = _system_json(system)
    if args.validate:
        ok = is_delta_system(system.members) is not None or len(system.members) < 2
        ok = ok and is_maximal_for_kernel(family, system)
        result["validated"] = ok
        if not ok:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def _system_json(system):
    return {
        "indices": list(system.indices),
        "members": [sorted(m) for m in system.members],
        "kernel": sorted(system.kernel),
        "degenerate": system.degenerate,
    }


def cmd_freeset(args):
    mapping = {int(k): [int(x) for x in v] for k, v in _load_json(args.map).items()}
    ground = _ints(args.ground) if args.ground else sorted(mapping)
    report = free_set(ground, {k: frozenset(v) for k, v in mapping.items()})
    result = {
        "chosen": sorted(report.chosen),
        "size": len(report.chosen),
        "maximum_size": report.maximum_size,
    }
    if args.validate:
        result["validated"] = is_free(
            report.chosen, {k: frozenset(v) for k, v in mapping.items()}
        )
        if not result["validated"]:
            return EXIT_VIOLATION, result
    return EXIT_OK, result


def cmd_corpus_gen(args):
    if args.spec:
        spec = _load_json(args.spec)
    else:
        generator = {"model": args.model, "n": args.n, "count": args.count}
        if args.p is not None:
            generator["p"] = args.p
        if args.d is not None:
            generator["d"] = args.d
        if args.cycles is not None:
            generator["cycles"] = args.cycles
        spec = {"generator": generator, "seed": args.seed}
    graphs = generate_corpus(spec)
    return EXIT_OK, {"spec": spec, "graphs": [graph_to_json(g) for g in graphs]}


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="fm",
        description="workbench for finite structures, hulls and graph decomposition",
    )
    top.add_argument("--budget", type=int, help="evaluation step budget")
    top.add_argument("--format", choices=["json", "dot", "text"], default="json")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula")
    p.add_argument("--formula", required=True)
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("eval", help="evaluate a formula over a structure")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--valuation", help='JSON object, e.g. {"x": 0}')
    p.add_argument("--relativize-to", help="comma list of elements; relativize and bound quantifiers to it")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("relativize", help="bound every quantifier to the distinguished subset")
    p.add_argument("--formula", required=True)
    p.set_defaults(handler=cmd_relativize)

    p = sub.add_parser("universe", help="hereditarily finite universe views")
    usub = p.add_subparsers(dest="action", required=True)
    d = usub.add_parser("dump", help="list rank / code / set notation")
    d.add_argument("--rank", type=int, required=True)
    d.add_argument("--limit", type=int)
    d.add_argument("--allow-rank5", action="store_true")
    d.set_defaults(handler=cmd_universe_dump)

    p = sub.add_parser("hull", help="witness-closure hull of a seed")
    p.add_argument("--structure", required=True)
    p.add_argument("--pack", required=True)
    p.add_argument("--seed-elems", default="")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(handler=cmd_hull)

    p = sub.add_parser("chain", help="increasing hull chain reaching a cover")
    p.add_argument("--structure", required=True)
    p.add_argument("--pack", required=True)
    p.add_argument("--seed-elems", default="")
    p.add_argument("--cover-elems", default="all")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(handler=cmd_chain)

    p = sub.add_parser("slice", help="slice a code-labelled graph along stages")
    p.add_argument("--graph", required=True)
    p.add_argument("--stages", required=True, help="JSON file: list of code lists")
    p.set_defaults(handler=cmd_slice)

    p = sub.add_parser("probe", help="reflection probe over a corpus")
    p.add_argument("--corpus", help="corpus spec JSON file")
    p.add_argument("--graph", help="single graph file instead of a corpus")
    p.add_argument("--pack", required=True)
    p.add_argument("--property", required=True, choices=sorted(PROPERTIES))
    p.add_argument("--allow-rank5", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_probe)

    p = sub.add_parser("graph", help="graph analysis")
    gsub = p.add_subparsers(dest="action", required=True)

    g = gsub.add_parser("bonds")
    g.add_argument("--graph", required=True)
    g.add_argument("--max-size", type=int)
    g.add_argument("--validate", action="store_true")
    g.set_defaults(handler=cmd_graph_bonds)

    g = gsub.add_parser("gamma")
    g.add_argument("--graph", required=True)
    g.add_argument("--x", type=int, required=True)
    g.add_argument("--y", type=int, required=True)
    g.add_argument("--paths", type=int)
    g.add_argument("--validate", action="store_true")
    g.set_defaults(handler=cmd_graph_gamma)

    g = gsub.add_parser("nw")
    g.add_argument("--graph", required=True)
    g.add_argument("--mode", choices=["fast", "exhaustive"], default="fast")
    g.set_defaults(handler=cmd_graph_nw)

    g = gsub.add_parser("veblen")
    g.add_argument("--graph", required=True)
    g.add_argument("--validate", action="store_true")
    g.set_defaults(handler=cmd_graph_veblen)

    g = gsub.add_parser("bridges")
    g.add_argument("--graph", required=True)
    g.add_argument("--validate", action="store_true")
    g.set_defaults(handler=cmd_graph_bridges)

    g = gsub.add_parser("dcc")
    g.add_argument("--graph", required=True)
    g.add_argument("--search-budget", type=int, default=200_000)
    g.set_defaults(handler=cmd_graph_dcc)

    p = sub.add_parser("bondfaithful", help="bond-faithful decompositions")
    bsub = p.add_subparsers(dest="action", required=True)

    b = bsub.add_parser("check")
    b.add_argument("--graph", required=True)
    b.add_argument("--parts", required=True, help="JSON file: list of graph objects")
    b.add_argument("--kappa", type=int, required=True)
    b.add_argument("--validate", action="store_true")
    b.set_defaults(handler=cmd_bondfaithful_check)

    b = bsub.add_parser("search")
    b.add_argument("--graph", required=True)
    b.add_argument("--kappa", type=int, required=True)
    b.add_argument("--search-budget", type=int, default=50_000)
    b.set_defaults(handler=cmd_bondfaithful_search)

    p = sub.add_parser("sunflower", help="delta-system finders")
    p.add_argument("action", choices=["find", "max", "trace"])
    p.add_argument("--family", required=True, help="JSON file: list of element lists")
    p.add_argument("--petals", type=int)
    p.add_argument("--m", help="JSON file: {elements: [...], members: [indices]}")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(handler=cmd_sunflower)

    p = sub.add_parser("freeset", help="greedy free set for a set mapping")
    p.add_argument("--map", required=True, help="JSON file: {element: [image...]}")
    p.add_argument("--ground", help="comma list; defaults to the mapping keys")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(handler=cmd_freeset)

    p = sub.add_parser("corpus", help="corpus generation")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("gen")
    c.add_argument("--spec", help="corpus spec JSON file")
    c.add_argument("--model", choices=["gnp", "regular", "union-of-cycles"], default="gnp")
    c.add_argument("--n", type=int, default=6)
    c.add_argument("--count", type=int, default=1)
    c.add_argument("--p", type=float)
    c.add_argument("--d", type=int)
    c.add_argument("--cycles", type=int)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(handler=cmd_corpus_gen)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the contract
        return int(exc.code or 0)
    try:
        code, result = args.handler(args)
    except BudgetExceededError as exc:
        print(f"fm: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, ParseError, EvalError, ValueError, KeyError) as exc:
        print(f"fm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, str):
        sys.stdout.write(result)
        return code
    report = {"schema": SCHEMA, "command": args.command, "result": result}
    if getattr(args, "format", "json") == "text":
        sys.stdout.write(_to_text(report) + "\n")
    else:
        sys.stdout.write(canonical_dumps(report))
    return code


def _to_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for key in sorted(obj):
            value = obj[key]
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(_to_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        lines = []
        for value in obj:
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}-")
                lines.append(_to_text(value, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(value)}")
        return "\n".join(lines)
    return f"{pad}{_scalar(obj)}"


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


if __name__ == "__main__":
    raise SystemExit(main())

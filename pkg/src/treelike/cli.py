"""Command-line front end: graph plumbing, extension arithmetic, and the
batch experiments, all emitting versioned JSON reports.

Subcommands
    fold      fold a graph (or the bouquet of generator words)
    core      fold, then strip spurs
    member    membership of a word in the subgroup read by a graph
    extend    universal extension order and word (in)equalities
    dissolve  run dissolving checks of a quotient against a base group
    tower     iterated-extension campaign over a base group
    rz        product-separation experiment for a word and subgroups

Reports go to stdout (and to --out when given) as JSON with sorted keys,
so identical configuration and seed produce byte-identical output; a
PASS/FAIL summary line goes to stderr.  Exit codes: 0 all checks passed,
1 a property failed (a constellation survived, an experiment stayed
inconclusive), 2 an enumeration budget was exceeded, 3 bad input.

A flat key-value JSON file passed with --config supplies defaults for
the chosen subcommand; explicit flags win.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .constellations import EXHAUSTIVE_EDGE_BUDGET, dissolves_all
from .extension import (S_EQUAL_BUDGET, ExtContext, ext_order,
                        extension_group, s_equal)
from .groups import (BUILTIN_NAMES, DEFAULT_ENUM_BUDGET,
                     EnumerationBudgetError, FinGroup, builtin,
                     group_from_json)
from .rational import member_product
from .stallings import (LabeledGraph, bouquet, core, fold, graph_from_json,
                        graph_to_dot, graph_to_json, member, stallings_graph)
from .tower import (MAX_LEVEL, TowerSpec, rz_experiment, treelike_campaign)
from .words import DEFAULT_ALPHABET, parse_word, reduce_word, word_str

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3


class CliInputError(ValueError):
    """Bad command line or config file; mapped to exit code 3."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which collides with
    # the budget exit code; raise instead and let main() map it to 3
    def error(self, message):
        raise CliInputError(message)


# -- input plumbing -----------------------------------------------------


def _split_csv(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _alphabet_arg(text: Optional[str]) -> tuple:
    if not text:
        return ()
    return tuple(_split_csv(text))


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliInputError("no such file: %s" % path)
    except json.JSONDecodeError as exc:
        raise CliInputError("%s: %s" % (path, exc))


def group_arg(text: str, enum_budget: int = DEFAULT_ENUM_BUDGET) -> FinGroup:
    """Group named on the command line: a builtin name, a JSON file, or
    NAME^p for the universal C_p-extension of NAME."""
    if text.endswith(".json"):
        return group_from_json(_load_json(text), name=Path(text).stem)
    if "^" in text:
        base_text, _, p_text = text.rpartition("^")
        base = group_arg(base_text, enum_budget)
        try:
            p = int(p_text)
        except ValueError:
            raise CliInputError("group %r: exponent after ^ must be an "
                                "integer" % text)
        return extension_group(base, p, enum_budget=enum_budget)
    try:
        return builtin(text)
    except ValueError:
        raise CliInputError("unknown group %r (builtins: %s; or give a "
                            ".json file)" % (text, ", ".join(BUILTIN_NAMES)))


def _input_graph(args) -> LabeledGraph:
    inputs = args.input
    if len(inputs) == 1 and inputs[0].endswith(".json"):
        return graph_from_json(_load_json(inputs[0]))
    alphabet = _alphabet_arg(args.alphabet)
    gens = [parse_word(text, alphabet or DEFAULT_ALPHABET)
            for text in inputs]
    return bouquet(gens, alphabet)


def _parse_primes(text: str) -> tuple:
    try:
        return tuple(int(p) for p in _split_csv(text))
    except ValueError:
        raise CliInputError("--primes: comma-separated integers expected, "
                            "got %r" % text)


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


def _status(ok: bool, detail: str = "") -> None:
    line = "PASS" if ok else "FAIL"
    if detail:
        line += ": " + detail
    print(line, file=sys.stderr)


# -- subcommands --------------------------------------------------------


def cmd_fold(args):
    g = fold(_input_graph(args))
    if args.dot:
        Path(args.dot).write_text(graph_to_dot(g))
    return {"schema": 1, "command": "fold", "graph": graph_to_json(g)}, EXIT_OK


def cmd_core(args):
    g = core(fold(_input_graph(args)))
    if args.dot:
        Path(args.dot).write_text(graph_to_dot(g))
    return {"schema": 1, "command": "core", "graph": graph_to_json(g)}, EXIT_OK


def cmd_member(args):
    if bool(args.graph) == bool(args.gens):
        raise CliInputError("member: give exactly one of --graph/--gens")
    if args.graph:
        g = graph_from_json(_load_json(args.graph))
    else:
        alphabet = _alphabet_arg(args.alphabet)
        gens = [parse_word(t, alphabet or DEFAULT_ALPHABET)
                for t in _split_csv(args.gens)]
        g = stallings_graph(gens, alphabet)
    w = reduce_word(parse_word(args.word, g.alphabet))
    verdict = member(g, w)
    report = {
        "schema": 1,
        "command": "member",
        "word": args.word,
        "reduced": word_str(w, g.alphabet),
        "member": verdict,
    }
    return report, EXIT_OK


def cmd_extend(args):
    G = group_arg(args.group, args.budget_enum)
    report = {
        "schema": 1,
        "command": "extend",
        "group": G.name,
        "separated": G.separated(),
        "equalities": [],
    }
    if not G.separated():
        # extension arithmetic still works; only certificates refuse
        report["warning"] = ("generator images do not separate: need two "
                             "or more distinct nonidentity generators")
    ctx = None
    S = None
    if args.p is not None:
        ctx = ExtContext(G, args.p)
        report["p"] = args.p
        report["ext_order"] = ext_order(G, G.n_letters, args.p)
    else:
        S = builtin(args.S)
        report["S"] = S.name
    for u_text, v_text in args.eq or []:
        u = parse_word(u_text, G.alphabet)
        v = parse_word(v_text, G.alphabet)
        entry = {"u": u_text, "v": v_text}
        if ctx is not None:
            entry["equal"] = ctx.evaluate(u) == ctx.evaluate(v)
            entry["method"] = "cocycle"
        else:
            mode = args.eq_mode
            res = None
            if mode == "auto":
                try:
                    res = s_equal(G, S, u, v, mode="exact",
                                  budget=args.budget_homs)
                    mode = "exact"
                except EnumerationBudgetError:
                    mode = "witness"
            if res is None:
                res = s_equal(G, S, u, v, mode=mode, samples=args.samples,
                              budget=args.budget_homs, seed=args.seed)
            entry["equal"] = res.status != "distinct"
            entry["status"] = res.status
            entry["method"] = mode
            if mode == "witness":
                entry["seed"] = args.seed
        report["equalities"].append(entry)
    return report, EXIT_OK


def cmd_dissolve(args):
    H = group_arg(args.H, args.budget_enum)
    G = group_arg(args.G, args.budget_enum)
    report = dissolves_all(H, G, mode=args.mode,
                           edge_budget=args.edge_budget,
                           samples=args.samples, max_len=args.max_len,
                           seed=args.seed, detail_limit=args.detail_limit)
    report["command"] = "dissolve"
    ok = report["all_dissolved"]
    _status(ok, "" if ok else "%d of %d constellations not dissolved"
            % (report["total"] - report["dissolved"], report["total"]))
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_tower(args):
    if not args.base or not args.primes:
        raise CliInputError("tower: --base and --primes are required "
                            "(directly or via --config)")
    base = group_arg(args.base, args.budget_enum)
    spec = TowerSpec(base, _parse_primes(args.primes),
                     max_level=args.max_level,
                     enum_budget=args.budget_enum, seed=args.seed)
    report = treelike_campaign(spec, levels=args.levels, mode=args.mode,
                               step=args.step,
                               edge_budget=args.edge_budget,
                               samples=args.samples, max_len=args.max_len,
                               detail_limit=args.detail_limit)
    report["command"] = "tower"
    ok = report["all_dissolved"]
    _status(ok)
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_rz(args):
    base = group_arg(args.base, args.budget_enum)
    spec = TowerSpec(base, _parse_primes(args.primes),
                     max_level=args.max_level,
                     enum_budget=args.budget_enum, seed=args.seed)
    factor_texts = [t for t in (args.h1, args.h2, args.h3, args.h4)
                    if t is not None]
    cores = [stallings_graph([parse_word(t, base.alphabet)
                              for t in _split_csv(text)], base.alphabet)
             for text in factor_texts]
    w = reduce_word(parse_word(args.w, base.alphabet))
    report = rz_experiment(spec, cores, w, max_level=args.max_level)
    report["command"] = "rz"
    # conclusive either way is a pass; only an unresolved non-member fails
    ok = report["member"] or report["separated_at"] is not None
    _status(ok, "" if ok else "non-member not separated at any "
            "enumerable level")
    return report, EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for every randomized step (default 0)")
    common.add_argument("--budget-enum", type=int,
                        default=DEFAULT_ENUM_BUDGET, dest="budget_enum",
                        help="group enumeration budget")
    common.add_argument("--budget-homs", type=int, default=S_EQUAL_BUDGET,
                        dest="budget_homs",
                        help="assignment-scan budget for word equality")
    common.add_argument("--max-level", type=int, default=MAX_LEVEL,
                        dest="max_level", help="highest tower level")
    common.add_argument("--out", metavar="PATH",
                        help="also write the JSON report to PATH")
    common.add_argument("--config", metavar="PATH",
                        help="flat key-value JSON file of defaults for "
                             "this subcommand")

    parser = _Parser(prog="treelike",
                     description="finite quotients, constellations, and "
                                 "separation experiments on labelled "
                                 "graphs")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")

    p = sub.add_parser("fold", parents=[common],
                       help="fold a graph or a bouquet of generators")
    p.add_argument("input", nargs="+",
                   help="a graph .json file, or generator words")
    p.add_argument("--alphabet", help="comma-separated letter names")
    p.add_argument("--dot", metavar="PATH", help="write DOT drawing")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("core", parents=[common],
                       help="fold, then strip non-basepoint spurs")
    p.add_argument("input", nargs="+",
                   help="a graph .json file, or generator words")
    p.add_argument("--alphabet", help="comma-separated letter names")
    p.add_argument("--dot", metavar="PATH", help="write DOT drawing")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("member", parents=[common],
                       help="subgroup membership for a word")
    p.add_argument("word", help="word to test (reduced automatically)")
    p.add_argument("--graph", metavar="PATH", help="graph .json file")
    p.add_argument("--gens", help="comma-separated generator words")
    p.add_argument("--alphabet", help="comma-separated letter names")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("extend", parents=[common],
                       help="universal extension order and equalities")
    p.add_argument("group", help="builtin name, .json file, or NAME^p")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--p", type=int, help="prime for a C_p-extension")
    which.add_argument("--S", help="builtin simple group for the "
                                   "equality oracle")
    p.add_argument("--eq", nargs=2, action="append", metavar=("U", "V"),
                   help="word pair to compare (repeatable)")
    p.add_argument("--eq-mode", choices=("auto", "exact", "witness"),
                   default="auto", dest="eq_mode")
    p.add_argument("--samples", type=int, default=4000,
                   help="witness-mode sample count")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("dissolve", parents=[common],
                       help="dissolving checks of a quotient against a "
                            "base group")
    p.add_argument("--H", required=True, help="quotient group")
    p.add_argument("--G", required=True, help="base group")
    p.add_argument("--mode", choices=("exhaustive", "sampled"),
                   default="exhaustive")
    p.add_argument("--edge-budget", type=int,
                   default=EXHAUSTIVE_EDGE_BUDGET, dest="edge_budget")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--max-len", type=int, default=8, dest="max_len")
    p.add_argument("--detail-limit", type=int, default=50,
                   dest="detail_limit")
    p.set_defaults(func=cmd_dissolve)

    p = sub.add_parser("tower", parents=[common],
                       help="iterated-extension campaign")
    p.add_argument("--base", help="base group")
    p.add_argument("--primes", help="comma-separated primes, lowest "
                                    "level first")
    p.add_argument("--levels", type=int, default=1,
                   help="how many base levels to check")
    p.add_argument("--mode", choices=("exhaustive", "sampled"),
                   default="exhaustive")
    p.add_argument("--step", choices=("extension", "identity"),
                   default="extension",
                   help="quotient for each level ('identity' is the "
                        "failing baseline)")
    p.add_argument("--edge-budget", type=int,
                   default=EXHAUSTIVE_EDGE_BUDGET, dest="edge_budget")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-len", type=int, default=8, dest="max_len")
    p.add_argument("--detail-limit", type=int, default=50,
                   dest="detail_limit")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("rz", parents=[common],
                       help="product-separation experiment")
    p.add_argument("--h1", required=True,
                   help="comma-separated generators of the first factor")
    p.add_argument("--h2", required=True,
                   help="generators of the second factor")
    p.add_argument("--h3", help="generators of the third factor")
    p.add_argument("--h4", help="generators of the fourth factor")
    p.add_argument("--w", required=True, help="word to separate")
    p.add_argument("--base", default="C2xC2", help="tower base group")
    p.add_argument("--primes", default="2",
                   help="comma-separated tower primes")
    p.set_defaults(func=cmd_rz)

    return parser


def _splice_config(argv: Sequence[str]) -> List[str]:
    """Pull --config FILE out of argv and splice the file's key-value
    pairs back in as flags right after the subcommand, so flags given
    explicitly win (argparse keeps the last occurrence)."""
    argv = list(argv)
    path = None
    rest: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config":
            if i + 1 >= len(argv):
                raise CliInputError("--config: missing file argument")
            path = argv[i + 1]
            i += 2
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            i += 1
        else:
            rest.append(tok)
            i += 1
    if path is None:
        return rest
    data = _load_json(path)
    if not isinstance(data, dict):
        raise CliInputError("%s: flat key-value object expected" % path)
    flags: List[str] = []
    for key in sorted(data):
        name = "--" + str(key).replace("_", "-")
        value = data[key]
        if isinstance(value, bool):
            if value:
                flags.append(name)
        elif isinstance(value, list):
            flags.extend([name, ",".join(str(x) for x in value)])
        else:
            flags.extend([name, str(value)])
    for pos, tok in enumerate(rest):
        if not tok.startswith("-"):
            return rest[:pos + 1] + flags + rest[pos + 1:]
    return rest + flags


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        argv = _splice_config(sys.argv[1:] if argv is None else argv)
        args = _build_parser().parse_args(argv)
        report, code = args.func(args)
    except CliInputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except EnumerationBudgetError as exc:
        print("budget exceeded: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    if report is not None:
        _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())

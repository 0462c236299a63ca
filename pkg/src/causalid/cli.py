"""Command-line interface.

Exit status: 0 on success (identifiable, consistent), 1 when the answer is
negative (non-identifiable, falsified), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from . import falsify, oracle
from .expr import parse, render_latex, render_text, simplify
from .graph import load_graph
from .identify import Query, identify_conditional
from .separation import implied_independencies, m_separated
from .surrogate import load_sources, trso

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _list(text: str | None) -> list[str]:
    if not text:
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


def _render(expression, fmt: str) -> str:
    return render_latex(expression) if fmt == "latex" else render_text(expression)


def _print_identification(result, fmt: str) -> int:
    if fmt == "json":
        print(json.dumps(result.to_json(), indent=2))
    elif result.identifiable:
        print(_render(result.estimand, fmt))
    else:
        witness = getattr(result, "witness", None)
        detail = witness.description if hasattr(witness, "description") else result.reason
        print(f"not identifiable: {detail}")
    return EXIT_OK if result.identifiable else EXIT_NEGATIVE


def cmd_identify(args) -> int:
    g = load_graph(args.graph)
    q = Query(_list(args.do), _list(args.outcomes), _list(args.given))
    return _print_identification(identify_conditional(g, q), args.format)


def cmd_trso(args) -> int:
    g = load_graph(args.graph)
    q = Query(_list(args.do), _list(args.outcomes))
    result = trso(g, q, load_sources(args.sources), args.target)
    return _print_identification(result, args.format)


def cmd_dsep(args) -> int:
    g = load_graph(args.graph)
    separated = m_separated(g, _list(args.left), _list(args.right), _list(args.given))
    print("separated" if separated else "connected")
    return EXIT_OK


def cmd_ci(args) -> int:
    g = load_graph(args.graph)
    statements = implied_independencies(g, args.max_given)
    if args.format == "json":
        print(json.dumps([str(s) for s in statements], indent=2))
    else:
        for s in statements:
            print(s)
    return EXIT_OK


def cmd_falsify(args) -> int:
    g = load_graph(args.graph)
    data = falsify.load_csv(args.data)
    report = falsify.falsify_report(g, data, args.alpha, args.max_given, args.correction, args.method)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        sys.stdout.write(report.to_text())
    return EXIT_NEGATIVE if report.falsified else EXIT_OK


def cmd_expr(args) -> int:
    e = parse(args.expression)
    if args.action == "simplify":
        e = simplify(e)
    print(render_latex(e) if args.action == "latex" else render_text(e))
    return EXIT_OK


def _load_scm(path) -> oracle.DiscreteScm:
    with open(path, encoding="utf-8") as handle:
        return oracle.DiscreteScm.from_json(json.load(handle))


def _dump_table(table) -> str:
    return json.dumps(
        {
            "variables": [name for name, _ in table.variables],
            "cardinalities": [card for _, card in table.variables],
            "table": [[*index, p] for index, p in table.probabilities.items()],
        },
        indent=2,
    )


def _assignments(text: str | None) -> dict[str, int]:
    out = {}
    for part in _list(text):
        name, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"expected NAME=VALUE, got {part!r}")
        out[name.strip()] = int(value)
    return out


def cmd_oracle(args) -> int:
    if args.action == "gen":
        m = oracle.random_scm(args.seed, args.n_observed, args.n_latent, args.max_parents, args.max_card)
        text = m.dumps()
    else:
        if not args.scm:
            raise UsageError(f"oracle {args.action} needs --scm")
        m = _load_scm(args.scm)
        if args.action == "joint":
            text = _dump_table(oracle.exact_joint(m, marginalize_latent=not args.keep_latent))
        elif args.action == "intervene":
            text = _dump_table(oracle.interventional_joint(m, _assignments(args.set)))
        else:
            data = oracle.sample(m, args.n, args.seed)
            if args.output:
                data.to_csv(args.output)
                return EXIT_OK
            text = "\n".join([",".join(data.names)] + [",".join(map(str, r)) for r in data.rows])
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identify", help="identify P_do(outcomes | given) with ID/IDC")
    p.add_argument("--graph", required=True)
    p.add_argument("--do", default="")
    p.add_argument("--outcomes", required=True)
    p.add_argument("--given", default="")
    p.add_argument("--format", choices=["text", "latex", "json"], default="text")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("trso", help="identify from observational and experimental sources")
    p.add_argument("--graph", required=True)
    p.add_argument("--sources", required=True)
    p.add_argument("--do", default="")
    p.add_argument("--outcomes", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--format", choices=["text", "latex", "json"], default="text")
    p.set_defaults(func=cmd_trso)

    p = sub.add_parser("dsep", help="test m-separation")
    p.add_argument("--graph", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--given", default="")
    p.set_defaults(func=cmd_dsep)

    p = sub.add_parser("ci", help="list implied conditional independencies")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-given", type=int, default=3)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("falsify", help="test implied independencies against a CSV file")
    p.add_argument("--graph", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--correction", choices=["holm", "bonferroni", "none"], default="holm")
    p.add_argument("--max-given", type=int, default=3)
    p.add_argument("--method", choices=["fisher_z", "g_test"], default=None)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("expr", help="parse, render or simplify an expression")
    p.add_argument("action", choices=["parse", "latex", "simplify"])
    p.add_argument("expression")
    p.set_defaults(func=cmd_expr)

    p = sub.add_parser("oracle", help="generate and query exact discrete models")
    p.add_argument("action", choices=["gen", "joint", "intervene", "sample"])
    p.add_argument("--scm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-observed", type=int, default=4)
    p.add_argument("--n-latent", type=int, default=0)
    p.add_argument("--max-parents", type=int, default=2)
    p.add_argument("--max-card", type=int, default=2)
    p.add_argument("--keep-latent", action="store_true")
    p.add_argument("--set", help="interventions as NAME=VALUE,...")
    p.add_argument("-n", type=int, default=1000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    # graph, expression and data errors all derive from ValueError
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

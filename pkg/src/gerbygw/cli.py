"""Command-line front end.

Every command writes one JSON document (sorted keys, versioned) to stdout
and a one-line summary to stderr.  Exit codes: 0 all checks pass, 1 a check
failed, 2 usage error, 3 malformed input, 4 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import GerbyError, InputError
from .graphs import (
    dimension,
    euler_characteristic,
    format_fraction,
    gerby_graph_from_json,
    is_stable,
    target_from_json,
    validate_graph,
)

SCHEMA = "gerbygw/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2, 3, 4


def _load(path, what):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path!r}: {exc.strerror}", "") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path!r} is not valid JSON: {exc.msg} (line {exc.lineno})", "") from None


def _load_group(path):
    from .groups import group_from_json

    return group_from_json(_load(path, "group"))


def _cyclo(x) -> str:
    return format_fraction(x.to_fraction()) if x.is_rational() else str(x)


# -- commands ------------------------------------------------------------------


def cmd_stabilize(args):
    from .stabilize import absolute_stabilize, record_to_json, stabilize

    graph = validate_graph(_load(args.graph, "graph"))
    rec = absolute_stabilize(graph) if args.alpha_zero else stabilize(graph)
    doc = record_to_json(rec)
    doc["euler_characteristic"] = euler_characteristic(rec.graph)
    doc["stable"] = is_stable(rec.graph)
    return doc, EXIT_OK, f"stabilized: {len(rec.contracted)} vertices contracted"


def cmd_coeff(args):
    from .productformula import coefficient_c, gwclass_prefactor, triple_from_json, weighted_prefactor

    triple = triple_from_json(_load(args.triple, "triple"))
    c = coefficient_c(triple)
    doc = {
        "c": format_fraction(c),
        "shares_absolute_stabilization": triple.shares_absolute_stabilization(),
        "gwclass_prefactor": {
            "product": gwclass_prefactor(triple.product),
            "side1": gwclass_prefactor(triple.side1),
            "side2": gwclass_prefactor(triple.side2),
        },
        "weighted_prefactor": {
            "product": weighted_prefactor(triple.product),
            "side1": weighted_prefactor(triple.side1),
            "side2": weighted_prefactor(triple.side2),
        },
    }
    code = EXIT_OK if doc["shares_absolute_stabilization"] else EXIT_FAIL
    return doc, code, f"c = {format_fraction(c)}"


def cmd_dimension(args):
    target = target_from_json(_load(args.target, "target"))
    x = gerby_graph_from_json(_load(args.graph, "graph"), target)
    d = dimension(x)
    doc = {"dimension": format_fraction(d), "euler_characteristic": euler_characteristic(x.graph)}
    return doc, EXIT_OK, f"dimension = {format_fraction(d)}"


def cmd_chartable(args):
    from .groups import class_name

    group = _load_group(args.group)
    table = group.character_table
    conj = group.conjugacy
    classes = [
        {
            "index": k,
            "name": class_name(group, k),
            "size": conj.sizes[k],
            "centralizer": conj.centralizers[k],
            "inverse": conj.inverse[k],
        }
        for k in range(len(conj))
    ]
    doc = {
        "order": group.order,
        "conductor": table.conductor,
        "classes": classes,
        "dims": list(table.dims),
        "nu": [format_fraction(v) for v in table.nu],
        "characters": [[_cyclo(v) for v in row] for row in table.values],
        "verified": True,
    }
    if args.pretty:
        doc["pretty"] = _pretty_table(group, table)
    return doc, EXIT_OK, f"{len(conj)} classes, dims {list(table.dims)}"


def _pretty_table(group, table):
    from .groups import class_name

    heads = [class_name(group, k) for k in range(len(table))]
    rows = [[_cyclo(v) for v in row] for row in table.values]
    widths = [max(len(h), *(len(r[k]) for r in rows)) for k, h in enumerate(heads)]
    lines = ["      " + "  ".join(h.rjust(w) for h, w in zip(heads, widths))]
    for a, row in enumerate(rows):
        lines.append(f"X.{a + 1:<3} " + "  ".join(v.rjust(w) for v, w in zip(row, widths)))
    if any(not v.is_rational() for row in table.values for v in row):
        lines.append(f"z = exp(2 pi i / {table.conductor})")
    return lines


def cmd_omega(args):
    from .bgcohft import OmegaQuery, omega_bruteforce, omega_character
    from .groups import parse_class_list

    group = _load_group(args.group)
    try:
        classes = parse_class_list(group, args.classes)
    except InputError as exc:
        exc.pointer = "--classes"
        raise
    q = OmegaQuery(group, args.genus, tuple(classes))
    doc = {"genus": args.genus, "classes": classes}
    if args.method in ("brute", "both"):
        doc["brute"] = format_fraction(omega_bruteforce(q, threads=args.threads))
    if args.method in ("char", "both"):
        doc["character"] = format_fraction(omega_character(q))
    code = EXIT_OK
    if args.method == "both":
        doc["agree"] = doc["brute"] == doc["character"]
        code = EXIT_OK if doc["agree"] else EXIT_FAIL
    value = doc.get("brute", doc.get("character"))
    return doc, code, f"Omega = {value}"


def cmd_cohft(args):
    from .bgcohft import cohft_checks

    group = _load_group(args.group)
    reports = cohft_checks(group, args.max_genus, args.max_points, args.method)
    counts = {}
    for r in reports:
        c = counts.setdefault(r.name, {"run": 0, "failed": 0})
        c["run"] += 1
        c["failed"] += not r.passed
    failed = [r.to_json() for r in reports if not r.passed]
    doc = {"checks": counts, "failures": failed, "passed": not failed, "total": len(reports)}
    code = EXIT_OK if not failed else EXIT_FAIL
    return doc, code, f"{len(reports) - len(failed)}/{len(reports)} checks pass"


def cmd_potential(args):
    from .potentials import Bounds, check_decomposition, table_from_json

    table = table_from_json(_load(args.table, "table"))
    group = _load_group(args.group)
    report = check_decomposition(table, group, Bounds(args.tdeg, args.gmax), args.method)
    doc = report.to_json()
    doc["bounds"] = {"tdeg": args.tdeg, "gmax": args.gmax}
    code = EXIT_OK if report.passed else EXIT_FAIL
    return doc, code, "decomposition " + ("holds" if report.passed else "FAILS")


# -- parser ----------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="gerbygw", description="Gerby dual graphs and the BG CohFT.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stabilize", help="stabilize an A-graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--alpha-zero", action="store_true", help="forget curve classes first")
    s.set_defaults(func=cmd_stabilize)

    s = sub.add_parser("coeff", help="product coefficient of a graph triple")
    s.add_argument("--triple", required=True)
    s.set_defaults(func=cmd_coeff)

    s = sub.add_parser("dimension", help="expected dimension of a gerby X-graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--target", required=True)
    s.set_defaults(func=cmd_dimension)

    s = sub.add_parser("group", help="group utilities")
    gsub = s.add_subparsers(dest="group_command", required=True)
    c = gsub.add_parser("chartable", help="exact character table")
    c.add_argument("--group", required=True)
    c.add_argument("--pretty", action="store_true", help="also print an aligned text table on stderr")
    c.set_defaults(func=cmd_chartable)

    s = sub.add_parser("omega", help="Omega_g on conjugacy classes")
    s.add_argument("--group", required=True)
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--classes", default="")
    s.add_argument("--method", choices=("brute", "char", "both"), default="both")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_omega)

    s = sub.add_parser("cohft-check", help="CohFT axiom checks in a range")
    s.add_argument("--group", required=True)
    s.add_argument("--max-genus", type=int, default=2)
    s.add_argument("--max-points", type=int, default=4)
    s.add_argument("--method", choices=("auto", "brute", "char"), default="auto")
    s.set_defaults(func=cmd_cohft)

    s = sub.add_parser("potential-check", help="decomposition of the descendant potential")
    s.add_argument("--table", required=True)
    s.add_argument("--group", required=True)
    s.add_argument("--tdeg", type=int, default=4)
    s.add_argument("--gmax", type=int, default=2)
    s.add_argument("--method", choices=("auto", "brute", "char"), default="auto")
    s.set_defaults(func=cmd_potential)
    return p


def _emit(doc, code, summary):
    doc = dict(doc)
    doc["schema"] = SCHEMA
    pretty = doc.pop("pretty", None)
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    if pretty:
        # the text table goes to stderr so stdout stays a single JSON document
        sys.stderr.write("\n".join(pretty) + "\n")
    sys.stderr.write(summary + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, code, summary = args.func(args)
    except InputError as exc:
        err = {"error": {"kind": "input", "message": str(exc), "pointer": exc.pointer or ""}}
        return _emit(err, EXIT_INPUT, f"malformed input at {exc.pointer or '/'}: {exc}")
    except GerbyError as exc:
        err = {"error": {"kind": type(exc).__name__, "message": str(exc)}}
        return _emit(err, EXIT_COMPUTE, f"computation error: {exc}")
    return _emit(doc, code, summary)


if __name__ == "__main__":
    sys.exit(main())

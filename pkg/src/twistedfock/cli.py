"""Command line driver: verification suites, characters, highest weight vectors, tables.

Exit status: 0 when every consistency check passes, 1 on a closure or
consistency failure, 2 on a usage error.  Mismatches against the stated
lemma constants are warnings unless --strict-paper is given.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import os
import sys

from .character import character_table, dominance_check, generating_function, hwv_search, is_lambda_l
from .lattice import RootClass, classify_p_image, lattice
from .scalar import Cyclo8, Q, qstr
from .verify import SUITES, run_suite
from .vertex import PhaseConvention

OUTPUT_DIR_ENV = "TWISTEDFOCK_OUTPUT_DIR"

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _jsonable(x):
    if isinstance(x, Cyclo8):
        return x.to_strings()
    if isinstance(x, enum.Enum):
        return str(x)
    if isinstance(x, (tuple, set, frozenset)):
        return [_jsonable(y) for y in (sorted(x) if isinstance(x, (set, frozenset)) else x)]
    if isinstance(x, list):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if type(x).__name__ == "mpq":
        return qstr(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


# argument types -----------------------------------------------------------

def rank_arg(s: str) -> int:
    try:
        l = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"rank must be an integer, got {s!r}")
    if l < 2:
        raise argparse.ArgumentTypeError("rank must be at least 2")
    return l


def depth_arg(s: str):
    try:
        d = Q(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"depth must be a rational like 3 or 5/2, got {s!r}")
    if d < 0:
        raise argparse.ArgumentTypeError("depth must be nonnegative")
    if (2 * d).denominator != 1:
        raise argparse.ArgumentTypeError("depth must lie in Z/2")
    return d


def nonneg_int(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if n < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return n


def positive_int(s: str) -> int:
    n = nonneg_int(s)
    if n == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


# output ---------------------------------------------------------------------

def _emit(text: str, args, default_name: str) -> None:
    path = args.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], default_name)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fmt_c(strings) -> str:
    return repr(Cyclo8.from_strings(strings)) if strings is not None else "-"


# verify -----------------------------------------------------------------------

def _constants_diff(by_conv: dict) -> list:
    rows: dict = {}
    for conv, report in by_conv.items():
        for row in report.get("constants", []):
            key = (row["lemma"], row["subcase"], tuple(row["a"]), tuple(row["b"]), row["m_parity"], row["n_parity"])
            out = rows.setdefault(key, {"lemma": row["lemma"], "subcase": row["subcase"], "a": row["a"],
                                        "b": row["b"], "m_parity": row["m_parity"], "n_parity": row["n_parity"],
                                        "stated": row["stated"]})
            out[conv] = row["fitted"]
    return list(rows.values())


def cmd_verify(args) -> int:
    suites = SUITES if "all" in args.suite else tuple(dict.fromkeys(args.suite))
    conventions = ([PhaseConvention.FULL_EXPONENT, PhaseConvention.LATTICE_ONLY]
                   if args.phase_convention == "both" else [PhaseConvention(args.phase_convention)])
    by_conv = {}
    for conv in conventions:
        reports = []
        for name in suites:
            reports.append(run_suite(name, args.rank, depth=args.depth, mode_range=args.modes, convention=conv,
                                     seed=args.seed, jobs=args.jobs, strict_paper=args.strict_paper))
        by_conv[str(conv)] = {"convention": str(conv), "suites": reports,
                              "ok": all(r["ok"] for r in reports)}
    config = {"rank": args.rank, "depth": qstr(args.depth), "modes": args.modes, "seed": args.seed,
              "suites": list(suites), "phase_convention": args.phase_convention,
              "strict_paper": args.strict_paper}
    if "brackets" in suites:
        brackets = {c: next(r for r in rep["suites"] if r["suite"] == "brackets") for c, rep in by_conv.items()}
    else:
        brackets = {}
    # closure holding under one convention is enough; strict mode needs the stated constants too
    ok = any(rep["ok"] for rep in by_conv.values())
    doc = {"config": config, "reports": by_conv, "ok": ok}
    if len(brackets) > 1:
        doc["constants_diff"] = _constants_diff(brackets)
    if args.format == "json":
        text = dumps(doc)
    else:
        text = _verify_text(doc, brackets)
    _emit(text, args, f"verify-rank{args.rank}.{args.format}")
    return EXIT_OK if ok else EXIT_FAILURE


def _verify_text(doc: dict, brackets: dict) -> str:
    out = io.StringIO()
    cfg = doc["config"]
    out.write(f"rank {cfg['rank']}  depth {cfg['depth']}  modes {cfg['modes']}  seed {cfg['seed']}\n")
    for conv, rep in doc["reports"].items():
        out.write(f"\n[{conv}]\n")
        for r in rep["suites"]:
            status = "ok" if r["ok"] else "FAILED"
            out.write(f"  {r['suite']:<12} checks {r['checks']:>7}  {status}\n")
            if r["suite"] == "brackets":
                out.write(f"    closure failures {len(r['closure_failures'])}, "
                          f"stated-constant mismatches {r['stated_mismatches']}\n")
            if r["suite"] == "cartan":
                for rel in r["relations"]:
                    if not rel["holds"]:
                        out.write(f"    fails: {rel['relation']}  (fitted {_fmt_c(rel['fitted'])})\n")
    for conv, rep in brackets.items():
        out.write(f"\nconstants [{conv}]: lemma subcase a b parity fitted / stated\n")
        for row in rep["constants"]:
            fitted = ", ".join(_fmt_c(x) for x in row["fitted"]) or "not exercised"
            stated = ", ".join(_fmt_c(x) for x in row["stated"]) or "-"
            flag = "" if row["match"] in (True, None) else "  <- differs"
            out.write(f"  {row['lemma']:<6} {row['subcase']:<2} {row['a']} {row['b']} "
                      f"({row['m_parity']},{row['n_parity']})  {fitted} / {stated}{flag}\n")
    out.write(f"\n{'OK' if doc['ok'] else 'FAILED'}\n")
    return out.getvalue()


# character --------------------------------------------------------------------

def cmd_character(args) -> int:
    table = character_table(args.rank, args.depth)
    doc = table.to_json()
    ok = True
    if args.oracle:
        expect = generating_function(args.rank, args.depth)
        got = table.slice_totals()
        ok = got == expect
        doc["oracle"] = {"totals": {qstr(k): v for k, v in expect.items()}, "agrees": ok}
    if args.format == "json":
        text = dumps(doc)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree_offset"] + [f"h{i + 1}" for i in range(args.rank)] + ["multiplicity"])
        for fin, off, n in table.rows():
            w.writerow([qstr(off)] + [qstr(x) for x in fin] + [n])
        text = buf.getvalue()
    else:
        lines = [f"rank {args.rank}  depth {qstr(args.depth)}  top degree {qstr(table.top)}",
                 "offset  dimension"]
        lines += [f"{qstr(k):>6}  {v}" for k, v in table.slice_totals().items()]
        if args.oracle:
            lines.append("generating function agrees" if ok else "generating function DISAGREES")
        text = "\n".join(lines) + "\n"
    _emit(text, args, f"character-rank{args.rank}.{args.format}")
    return EXIT_OK if ok else EXIT_FAILURE


# hwv --------------------------------------------------------------------------

def cmd_hwv(args) -> int:
    rep = hwv_search(args.rank, args.depth, args.height, args.pure)
    doc = rep.to_json()
    doc["lambda_l"] = [w is not None and is_lambda_l(w) for w in rep.weights]
    if args.dominance is not None:
        doc["dominance"] = dominance_check(args.rank, args.dominance)
    ok = len(rep.vectors) == 1 and all(doc["lambda_l"])
    if args.format == "json":
        text = dumps(doc)
    else:
        lines = [f"rank {args.rank}  depth {qstr(args.depth)}  vectors {len(rep.vectors)}"]
        for v, w in zip(rep.vectors, rep.weights):
            ws = "mixed" if w is None else f"h={[qstr(x) for x in w.finite]} d0={qstr(w.d0)} level {w.level}"
            lines.append(f"  {v}  weight {ws}")
        if args.dominance is not None:
            lines.append(f"dominant solutions within height {args.dominance}: {doc['dominance']['solutions']}")
        text = "\n".join(lines) + "\n"
    _emit(text, args, f"hwv-rank{args.rank}.{args.format}")
    return EXIT_OK if ok else EXIT_FAILURE


# tables -------------------------------------------------------------------------

def tables(l: int, what: str) -> dict:
    lat = lattice(l)
    if what == "roots":
        return {str(c): [list(r) for r in lat.root_tuples(c)] for c in (RootClass.SHORT, RootClass.MIDDLE, RootClass.LONG)}
    if what == "cocycle":
        simple = [tuple(int(i == j) for j in range(l)) for i in range(l)]
        return {"simple": [[lat.cocycle(a, b) for b in simple] for a in simple],
                "roots": [{"a": list(a), "b": list(b), "eps": lat.cocycle(a, b)}
                          for a in lat.finite_roots() for b in lat.finite_roots()]}
    if what == "p":
        rows = []
        for r in lat.root_tuples():
            info = classify_p_image(lat, r)
            rows.append({"root": list(r), "class": str(info["class"]), "p": list(info["p"]), "p0": list(info["p0"]),
                         "ok": info["ok"], "literal": info["literal"]})
        return {"rows": rows}
    if what == "gcm":
        return {"gcm": lat.cartan_matrix()}
    raise ValueError(what)


def cmd_tables(args) -> int:
    doc = tables(args.rank, args.what)
    if args.format == "json":
        text = dumps(doc)
    else:
        lines = []
        if args.what == "roots":
            for c, rs in doc.items():
                lines.append(f"{c} ({len(rs)}): " + " ".join(str(tuple(r)) for r in rs))
        elif args.what == "cocycle":
            lines.append("eps(alpha_i, alpha_j):")
            lines += ["  " + " ".join(f"{x:>2}" for x in row) for row in doc["simple"]]
        elif args.what == "p":
            for row in doc["rows"]:
                lines.append(f"{str(tuple(row['root'])):<16} {row['class']:<7} p={tuple(row['p'])} p0={tuple(row['p0'])}"
                             + ("" if row["literal"] else "  (outside literal index range)"))
        else:
            lines += [" ".join(f"{x:>2}" for x in row) for row in doc["gcm"]]
        text = "\n".join(lines) + "\n"
    _emit(text, args, f"tables-{args.what}-rank{args.rank}.{args.format}")
    return EXIT_OK


# parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistedfock", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json"), depth="3"):
        sp.add_argument("--rank", type=rank_arg, default=2)
        sp.add_argument("--depth", type=depth_arg, default=depth_arg(depth))
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--output", help=f"output file ('-' for stdout); default ${OUTPUT_DIR_ENV}/<name> or stdout")

    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("--suite", action="append", choices=SUITES + ("all",),
                   help="suite to run (repeatable, default all)")
    v.add_argument("--modes", type=nonneg_int, default=2, help="mode range |m|, |n| <= MODES")
    v.add_argument("--phase-convention", choices=[c.value for c in PhaseConvention] + ["both"],
                   default=PhaseConvention.FULL_EXPONENT.value)
    v.add_argument("--strict-paper", action="store_true", help="treat stated-constant mismatches as failures")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--jobs", type=positive_int, default=1)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("character", help="graded dimensions and weight multiplicities")
    common(c, ("text", "csv", "json"))
    c.add_argument("--oracle", action="store_true", help="cross-check totals against the generating function")
    c.set_defaults(func=cmd_character)

    h = sub.add_parser("hwv", help="highest weight vectors in a window")
    common(h, depth="2")
    h.add_argument("--height", type=positive_int, default=None, help="lattice coefficient bound")
    h.add_argument("--pure", action="store_true", help="search pure exponentials only")
    h.add_argument("--dominance", type=nonneg_int, default=None, metavar="HEIGHT",
                   help="also run the dominance scan up to this height")
    h.set_defaults(func=cmd_hwv)

    t = sub.add_parser("tables", help="static lattice data")
    t.add_argument("--rank", type=rank_arg, default=2)
    t.add_argument("--what", choices=("roots", "cocycle", "p", "gcm"), required=True)
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--output")
    t.set_defaults(func=cmd_tables)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "suite", None) is None and args.command == "verify":
        args.suite = ["all"]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

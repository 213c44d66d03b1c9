"""Command-line front end: datum parsing, per-module reports, batch grids.

Input documents are JSON objects with keys p, n, optional field (extension
degree over the prime field, default 1), and either `nu` (pole-order
shorthand, expanding to u_i = s^(-nu_i)) or `u` (explicit series literals as
lists of [exponent, coefficient] pairs; coefficients are integers, or
coordinate lists over extension fields).

Every subcommand cross-checks its own output where two routes exist and
exits nonzero on any mismatch, so the tool doubles as a verifier.  Reports
come in a human layout by default and as stable JSON under --json."""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import intpoly as ip
from .coeff import finite_field, lift_ring
from .conductor import (
    claim_pole_check,
    section_degree_oracle,
    sort_bound_check,
    theorem_conductor,
)
from .errors import WittramError
from .localsym import LocalSymbolInput, modulus_vanishing_test, residue_vector
from .series import TruncatedLaurentSeries
from .tower import (
    CoverDatum,
    build_tower,
    conductor_exponent,
    predicted_invariants,
    ramification_filtration,
    tower_invariants,
)
from .wbar import (
    divisor_ledger,
    psi_on_sections,
    psi_pullback,
    pushforward_recursion_check,
    section_dim,
    ChowClass,
)
from .witt import WittVector, build_table, witt_add, witt_mul, witt_neg


class JobSpec:
    """One parsed invocation: subcommand, parameters, budget, format."""

    def __init__(self, command, params, budget=None, fmt="human", seed=0):
        self.command = command
        self.params = params
        self.budget = budget
        self.fmt = fmt
        self.seed = seed


def _error_code(exc):
    name = type(exc).__name__
    out = []
    for ch in name:
        if ch.isupper() and out:
            out.append("-")
        out.append(ch.lower())
    return "".join(out)


def _parse_int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def parse_datum(source):
    """Read a JSON datum document (path or parsed object) into a CoverDatum."""
    if isinstance(source, str):
        with open(source) as fh:
            doc = json.load(fh)
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ValueError("datum document must be a JSON object")
    try:
        p = int(doc["p"])
        n = int(doc["n"])
    except KeyError as missing:
        raise ValueError(f"datum document lacks required key {missing}")
    f = int(doc.get("field", 1))
    if "nu" in doc:
        nu = [int(v) for v in doc["nu"]]
        for v in nu:
            if v % p == 0:
                raise ValueError(
                    f"pole order {v} is divisible by p={p}; "
                    "the wild-cover hypothesis needs orders prime to p"
                )
        return CoverDatum.from_orders(p, n, f, nu)
    if "u" in doc:
        ring = finite_field(p, f)
        entries = []
        for literal in doc["u"]:
            terms = []
            for pair in literal:
                e, c = pair[0], pair[1]
                coeff = (
                    ring.from_coords(tuple(c)) if isinstance(c, list) else ring.from_int(c)
                )
                terms.append((int(e), coeff))
            entries.append(TruncatedLaurentSeries.from_terms(ring, terms))
        return CoverDatum(p, n, ring, entries)
    raise ValueError("datum document needs either `nu` or `u`")


def _datum_from_args(args):
    if getattr(args, "datum", None):
        return parse_datum(args.datum)
    if args.p is None or args.n is None or args.nu is None:
        raise ValueError("provide --p, --n and --nu, or a --datum document")
    nu = _parse_int_list(args.nu)
    return CoverDatum.from_orders(args.p, args.n, getattr(args, "field", 1), nu)


# ---------- report emission ----------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return repr(x)


def _emit(report, fmt, out=None):
    out = sys.stdout if out is None else out
    if fmt == "json":
        print(json.dumps(_jsonable(report), sort_keys=True), file=out)
        return
    for key, val in report.items():
        if key == "cases" and val and isinstance(val[0], dict):
            _emit_table(val, out)
        elif isinstance(val, dict):
            print(f"{key}:", file=out)
            for k2, v2 in val.items():
                print(f"  {k2}: {_human(v2)}", file=out)
        else:
            print(f"{key}: {_human(val)}", file=out)


def _emit_table(rows, out):
    cols = list(rows[0])
    cells = [[_human(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)), file=out)
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)), file=out)


def _human(v):
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_human(x) for x in v) + "]"
    return str(v)


# ---------- polynomial pretty-printing for `witt table` ----------


def _var_name(v):
    return f"{'XY'[v % 2]}{v // 2}"


def format_packed_poly(poly, nvars, var_name=_var_name):
    """Deterministic human form of a packed integer polynomial."""
    if not poly:
        return "0"
    rows = []
    for key, coeff in poly.items():
        exps = ip.unpack(key, nvars)
        rows.append((tuple(exps), coeff))
    rows.sort(reverse=True)
    parts = []
    for exps, coeff in rows:
        factors = [
            f"{var_name(v)}^{e}" if e > 1 else var_name(v)
            for v, e in enumerate(exps)
            if e
        ]
        body = "*".join(factors) if factors else "1"
        if coeff == 1 and factors:
            parts.append(body)
        elif coeff == -1 and factors:
            parts.append(f"-{body}")
        else:
            parts.append(f"{coeff}*{body}" if factors else str(coeff))
    text = " + ".join(parts)
    return text.replace("+ -", "- ")


# ---------- subcommands ----------


def _cmd_conductor(args):
    if getattr(args, "datum", None) is None:
        if args.p is None or args.n is None or args.nu is None:
            raise ValueError("provide --p, --n and --nu, or a --datum document")
        p, n, nu = args.p, args.n, tuple(_parse_int_list(args.nu))
    else:
        d = parse_datum(args.datum)
        p, n, nu = d.p, d.n, d.nu
    closed = theorem_conductor(p, n, nu)
    oracle = section_degree_oracle(p, n, nu)
    m, e, mu = predicted_invariants(p, n, nu)
    report = {
        "p": p,
        "n": n,
        "nu": list(nu),
        "conductor_closed_form": closed["conductor"],
        "modulus_bound": closed["M"],
        "conductor_lattice_oracle": oracle["M"] + 1,
        "match": closed["M"] == oracle["M"],
        "m": m[1:],
        "e_breaks": e[1:],
        "mu": mu[1:],
        "different": mu[n] + p**n - 1,
    }
    return report, report["match"]


def _cmd_tower(args):
    datum = _datum_from_args(args)
    tower = build_tower(datum, factor=args.budget_factor)
    filtration = ramification_filtration(tower)
    report = tower_invariants(tower, filtration)
    report["breaks"] = list(filtration.breaks)
    report["segments"] = [
        {"from": lo, "to": hi if hi is not None else "inf", "group_order": order}
        for (lo, hi, order) in filtration.segments()
    ]
    report["conductor_brute_force"] = conductor_exponent(filtration)
    closed = theorem_conductor(datum.p, datum.n, datum.nu)
    report["conductor_closed_form"] = closed["conductor"]
    ok = report["conductor_brute_force"] == closed["conductor"]
    report["match"] = ok
    if args.deep:
        report["sort_bound"] = sort_bound_check(tower)
        report["claim_pole"] = claim_pole_check(tower)
    report["nu"] = list(report["nu"])
    return report, ok


def _cmd_local_symbol(args):
    datum = _datum_from_args(args)
    u = WittVector(datum.entries)
    field = datum.ring
    bound = theorem_conductor(datum.p, datum.n, datum.nu)["M"]
    report = {
        "p": datum.p,
        "n": datum.n,
        "nu": list(datum.nu),
        "modulus_bound": bound,
    }
    ok = True
    if args.alpha:
        terms = []
        for e, c in json.loads(args.alpha):
            coeff = (
                field.from_coords(tuple(c)) if isinstance(c, list) else field.from_int(c)
            )
            terms.append((int(e), coeff))
        alpha = TruncatedLaurentSeries.from_terms(field, terms)
        symbol = residue_vector(LocalSymbolInput(u, alpha))
        report["alpha"] = args.alpha
        report["symbol"] = [list(map(int, c.coords)) for c in symbol]
        report["symbol_zero"] = symbol.is_zero()
    if args.probe:
        rng = random.Random(args.seed)
        probe = modulus_vanishing_test(u, bound, trials=args.trials, rng=rng)
        report["probe_trials"] = probe["trials"]
        report["probe_all_vanished"] = True
        report["witness_found"] = probe["witness_found"]
        if probe["witness_found"]:
            alpha, sym = probe["witness"]
            report["witness_alpha"] = repr(alpha)
            report["witness_symbol"] = [list(map(int, c.coords)) for c in sym]
    return report, ok


def _cmd_witt(args):
    p, n = args.p, args.n
    table = build_table(p, n)
    if args.action == "table":
        report = {"p": p, "n": n}
        for j in range(n):
            report[f"S_{j}"] = format_packed_poly(table.S[j], 2 * n)
        for j in range(n):
            report[f"c_{j}"] = format_packed_poly(table.c[j], 2 * n)
        for j in range(n):
            report[f"I_{j}"] = format_packed_poly(table.I[j], 2 * n)
        if args.products:
            for j in range(n):
                report[f"P_{j}"] = format_packed_poly(table.P[j], 2 * n)
        return report, True

    # evaluate: vectors over Z/p^m, checked through the ghost map
    m = args.mod_digits
    ring = lift_ring(p, m)
    x = WittVector(tuple(ring.from_int(v) for v in _parse_int_list(args.x)))
    ops = {
        "add": lambda: witt_add(x, _second(args, ring), table),
        "mul": lambda: witt_mul(x, _second(args, ring), table),
        "neg": lambda: witt_neg(x, table),
    }
    result = ops[args.action]()
    report = {
        "p": p,
        "n": n,
        "mod": p**m,
        "op": args.action,
        "x": _parse_int_list(args.x),
        "result": [int(c.coords[0]) for c in result],
    }
    ok = _ghost_check(args, table, ring, x, result)
    report["ghost_check"] = ok
    if args.action in ("add", "mul"):
        report["y"] = _parse_int_list(args.y)
    return report, ok


def _second(args, ring):
    if args.y is None:
        raise ValueError(f"--y is required for {args.action}")
    return WittVector(tuple(ring.from_int(v) for v in _parse_int_list(args.y)))


def _ghost_of(table, vec, j):
    p = table.p
    total = vec.ring.zero()
    for i in range(j + 1):
        total = total + (p**i) * vec[i] ** (p ** (j - i))
    return total


def _ghost_check(args, table, ring, x, result):
    """Ghost components of the result must match the ghost-side operation."""
    for j in range(table.n):
        got = _ghost_of(table, result, j)
        if args.action == "neg":
            want = -_ghost_of(table, x, j)
        else:
            y = _second(args, ring)
            gx, gy = _ghost_of(table, x, j), _ghost_of(table, y, j)
            want = gx + gy if args.action == "add" else gx * gy
        if got != want:
            return False
    return True


def _cmd_wbar(args):
    p, n = args.p, args.n
    ok = True
    report = {"p": p, "n": n}
    report["section_dims"] = {
        str(m): section_dim(p, n, m) for m in range(args.weight + 1)
    }
    rec = pushforward_recursion_check(p, n)
    report["pushforward_recursion"] = (
        f"{rec['lhs']} = {rec['constant']} + {rec['twisted']}"
    )
    ledger = divisor_ledger(p, n)
    report["ledger_components"] = {
        str(i): repr(comp) for i, comp in sorted(ledger.components.items())
    }
    report["ledger_inertia_orders"] = {
        str(i): v for i, v in sorted(ledger.inertia_orders.items())
    }
    report["ledger_boundary_class"] = repr(ledger.boundary_class)
    pullback_ok = True
    for i in range(1, n + 1):
        cls = ChowClass.generator(p, n, i)
        img = psi_pullback(cls)
        if img != p * cls:
            pullback_ok = False
    report["pullback_multiplies_by_codim_power"] = pullback_ok
    ok = ok and pullback_ok
    if args.psi:
        f = psi_on_sections(p, n - 1)
        report["psi"] = repr(f)
    return report, ok


def _cmd_grid(args):
    ps = _parse_int_list(args.p)
    ns = _parse_int_list(args.n)
    cases = []
    mismatches = 0
    for p in ps:
        for n in ns:
            for nu in _nu_tuples(p, n, args.nu_max):
                datum = CoverDatum.from_orders(p, n, 1, list(nu))
                tower = build_tower(datum, factor=args.budget_factor)
                filtration = ramification_filtration(tower)
                invariants = tower_invariants(tower, filtration)
                brute = conductor_exponent(filtration)
                closed = theorem_conductor(p, n, nu)["conductor"]
                oracle = section_degree_oracle(p, n, nu)["M"] + 1
                match = brute == closed == oracle
                mismatches += 0 if match else 1
                cases.append(
                    {
                        "p": p,
                        "n": n,
                        "nu": list(nu),
                        "conductor": brute,
                        "closed_form": closed,
                        "lattice_oracle": oracle,
                        "different": invariants["different"],
                        "match": match,
                    }
                )
    summary = (
        f"all {len(cases)} cases: formula = brute force"
        if mismatches == 0
        else f"{mismatches} of {len(cases)} cases mismatch"
    )
    return {"cases": cases, "summary": summary}, mismatches == 0


def _nu_tuples(p, n, nu_max):
    """All pole-order tuples with entries in 1..nu_max prime to p, sorted."""
    pool = [v for v in range(1, nu_max + 1) if v % p]
    out = [()]
    for _ in range(n):
        out = [t + (v,) for t in out for v in pool]
    return out


# ---------- argument parsing and dispatch ----------


def _add_common(sub, nu_required=True):
    sub.add_argument("--p", type=int, help="prime")
    sub.add_argument("--n", type=int, help="vector length / tower height")
    sub.add_argument("--nu", type=str, default=None, help="pole orders, comma-separated")
    sub.add_argument("--field", type=int, default=1, help="extension degree f of F_(p^f)")
    sub.add_argument("--datum", type=str, default=None, help="JSON datum document path")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized trials")
    common.add_argument(
        "--budget-factor",
        type=int,
        default=None,
        help="series window multiplier (default: WITTRAM_BUDGET_FACTOR or 4)",
    )
    parser = argparse.ArgumentParser(
        prog="wittram",
        description="Exact ramification invariants of cyclic p-power covers of k((s)).",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser(
        "conductor", parents=[common], help="closed formula vs lattice oracle"
    )
    _add_common(sc)

    st = subs.add_parser(
        "tower", parents=[common], help="build the tower and all invariants"
    )
    _add_common(st)
    st.add_argument("--deep", action="store_true", help="also run pole/sort checks")

    sl = subs.add_parser(
        "local-symbol", parents=[common], help="residue pairings for a datum"
    )
    _add_common(sl)
    sl.add_argument("--alpha", type=str, default=None, help="unit series as JSON [[e,c],...]")
    sl.add_argument("--probe", action="store_true", help="vanishing probe at the bound")
    sl.add_argument("--trials", type=int, default=25)

    sw = subs.add_parser(
        "witt", parents=[common], help="polynomial tables and vector arithmetic"
    )
    sw.add_argument("action", choices=["table", "add", "mul", "neg"])
    sw.add_argument("--p", type=int, required=True)
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--products", action="store_true", help="include product polynomials")
    sw.add_argument("--x", type=str, default=None, help="first vector, comma-separated")
    sw.add_argument("--y", type=str, default=None, help="second vector")
    sw.add_argument("--mod-digits", type=int, default=3, help="work over Z/p^this")

    sb = subs.add_parser(
        "wbar", parents=[common], help="graded sections, Chow classes, divisor ledger"
    )
    sb.add_argument("--p", type=int, required=True)
    sb.add_argument("--n", type=int, required=True)
    sb.add_argument("--weight", type=int, default=3, help="tabulate dims up to this weight")
    sb.add_argument("--psi", action="store_true", help="print the level-n section map")

    sg = subs.add_parser(
        "grid", parents=[common], help="batch cross-validation over parameter ranges"
    )
    sg.add_argument("--p", type=str, required=True, help="primes, comma-separated")
    sg.add_argument("--n", type=str, required=True, help="heights, comma-separated")
    sg.add_argument("--nu-max", type=int, default=7)

    return parser


COMMANDS = {
    "conductor": _cmd_conductor,
    "tower": _cmd_tower,
    "local-symbol": _cmd_local_symbol,
    "witt": _cmd_witt,
    "wbar": _cmd_wbar,
    "grid": _cmd_grid,
}


def run(job):
    """Execute a parsed job; returns (report, ok)."""
    return COMMANDS[job.command](job.params)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    job = JobSpec(
        args.command,
        args,
        budget=args.budget_factor,
        fmt="json" if args.json else "human",
        seed=args.seed,
    )
    try:
        report, ok = run(job)
    except WittramError as exc:
        print(f"error [{_error_code(exc)}]: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error [{_error_code(exc)}]: {exc}", file=sys.stderr)
        return 2
    _emit(report, job.fmt)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

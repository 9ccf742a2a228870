"""Command-line front end.

Exit codes: 0 on success or equal spectra, 2 on bad input, 3 when a
comparison finds a divergence (and when ``verify`` has a failing check).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import checks
from .heat import heat_report, heat_trace_check
from .krawtchouk import krawtchouk, krawtchouk_zeros, odd_dimension_zero_scan
from .orbifold import orientability, resolve, singular_strata
from .spectrum import EQUAL, compare_spectra, format_tsv, p_spectrum

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGES = 3


class InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _rounded(obj):
    """Round every float to 12 significant digits for stable JSON output."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, sort_keys=True)


def _cutoff(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if q < 0:
        raise argparse.ArgumentTypeError("cutoff must be non-negative")
    return q


def _load(ref: str | None):
    if not ref:
        raise InputError("a spec is required (builtin:<name> or a JSON file)")
    return resolve(ref)


def _check_p(spec, p: int):
    if not 0 <= p <= spec.d:
        raise InputError(f"--p {p} outside [0, {spec.d}] for {spec.name}")


# ---------------------------------------------------------------------------


def cmd_krawtchouk(args) -> int:
    if args.scan_odd_dims is not None:
        for d, pairs in odd_dimension_zero_scan(args.scan_odd_dims).items():
            body = " ".join(f"({p},{k})" for p, k in pairs) or "none"
            print(f"{d}: {body}")
        return EXIT_OK
    if args.d is None:
        raise InputError("--d is required unless --scan-odd-dims is given")
    if args.zeros:
        if args.p is None:
            raise InputError("--zeros needs --p")
        print(" ".join(map(str, krawtchouk_zeros(args.d, args.p))))
        return EXIT_OK
    ps = range(args.d + 1) if args.p is None else [args.p]
    print("p\t" + "\t".join(f"k={k}" for k in range(args.d + 1)))
    for p in ps:
        print(f"{p}\t" + "\t".join(str(krawtchouk(args.d, p, k)) for k in range(args.d + 1)))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    spec = _load(args.spec)
    _check_p(spec, args.p)
    table = p_spectrum(spec, args.p, args.cutoff)
    if args.format == "json":
        print(_dump_json(table.as_dict()))
    else:
        sys.stdout.write(format_tsv(table))
    return EXIT_OK


def cmd_compare(args) -> int:
    a, b = _load(args.spec_a), _load(args.spec_b)
    _check_p(a, args.p)
    if a.d != b.d:
        raise InputError(f"dimensions differ: {a.d} vs {b.d}")
    res = compare_spectra(p_spectrum(a, args.p, args.cutoff), p_spectrum(b, args.p, args.cutoff))
    print(res)
    return EXIT_OK if res == EQUAL else EXIT_DIVERGES


def _stratum_row(i, s) -> dict:
    exact = s.volume.exact
    return {
        "index": i,
        "dim": s.dim,
        "codim": s.codim,
        "isotropy_order": s.isotropy_order,
        "primary": s.primary,
        "volume": str(exact) if exact is not None
        else f"{s.volume.scale}*sqrt({s.volume.gram_det})",
        "volume_float": s.volume.value,
        "components": s.component_count,
        "orientation_preserving": s.orientation_preserving_isotropy,
        "representative": [str(x) for x in s.representative],
    }


def cmd_strata(args) -> int:
    spec = _load(args.spec or args.spec_pos)
    strata = singular_strata(spec)
    rows = [_stratum_row(i, s) for i, s in enumerate(strata)]
    if args.format == "json":
        print(_dump_json({"spec": spec.name, "orientability": orientability(spec, strata),
                          "strata": rows}))
        return EXIT_OK
    cols = list(_stratum_row(0, strata[0]).keys()) if strata else [
        "index", "dim", "codim", "isotropy_order", "primary", "volume", "volume_float",
        "components", "orientation_preserving", "representative"]
    print("\t".join(cols))
    for r in rows:
        cells = []
        for c in cols:
            v = r[c]
            if isinstance(v, float):
                v = _fmt(v)
            elif isinstance(v, list):
                v = "(" + ",".join(v) + ")"
            cells.append(str(v).lower() if isinstance(v, bool) else str(v))
        print("\t".join(cells))
    print(f"# orientability: {orientability(spec, strata)}")
    return EXIT_OK


def cmd_heat(args) -> int:
    spec = _load(args.spec)
    _check_p(spec, args.p)
    report = heat_report(spec, args.p)
    rows = heat_trace_check(spec, args.p, args.cutoff, args.t) if args.t else []
    if args.format == "json":
        out = report.as_dict()
        out["check"] = [{"t": r.t, "truncated": r.truncated, "predicted": r.predicted,
                         "relative_error": r.relative_error, "tail_bound": r.tail_bound}
                        for r in rows]
        print(_dump_json(out))
        return EXIT_OK
    print("j\tcoefficient")
    for j, v in report.c.items():
        print(f"{j}\t{_fmt(v)}")
    print(f"# B_plus={_fmt(report.B_plus)} k_plus={report.k_plus} "
          f"B_minus={_fmt(report.B_minus)} k_minus={report.k_minus}")
    if rows:
        print("t\ttruncated\tpredicted\trelative_error\ttail_bound")
        for r in rows:
            print("\t".join(_fmt(x) for x in
                            (r.t, r.truncated, r.predicted, r.relative_error, r.tail_bound)))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = checks.run_all()
    if args.json:
        print(json.dumps([{"criterion": r.name, "passed": r.passed,
                           "seconds": round(r.seconds, 3), "failures": r.failures}
                          for r in results], indent=2))
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_DIVERGES


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatorb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("krawtchouk", help="Krawtchouk values, zeros and odd-dimension scan")
    k.add_argument("--d", type=int)
    k.add_argument("--p", type=int)
    k.add_argument("--zeros", action="store_true")
    k.add_argument("--scan-odd-dims", type=int, metavar="MAX")
    k.set_defaults(func=cmd_krawtchouk)

    def spectral(p, fmt=True):
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--cutoff", type=_cutoff, required=True, help="rational Q")
        if fmt:
            p.add_argument("--format", choices=("tsv", "json"), default="tsv")

    s = sub.add_parser("spectrum", help="p-spectrum multiplicity table")
    s.add_argument("--spec", required=True)
    spectral(s)
    s.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("compare", help="compare two p-spectra up to a cutoff")
    c.add_argument("--spec-a", required=True)
    c.add_argument("--spec-b", required=True)
    spectral(c, fmt=False)
    c.set_defaults(func=cmd_compare)

    st = sub.add_parser("strata", help="singular strata census")
    st.add_argument("spec_pos", nargs="?", metavar="SPEC")
    st.add_argument("--spec")
    st.add_argument("--format", choices=("tsv", "json"), default="tsv")
    st.set_defaults(func=cmd_strata)

    h = sub.add_parser("heat", help="heat coefficients and numeric trace check")
    h.add_argument("--spec", required=True)
    spectral(h)
    h.add_argument("--t", type=float, action="append", default=[])
    h.set_defaults(func=cmd_heat)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"flatorb: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

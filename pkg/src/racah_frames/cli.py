"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed or a search did not
converge, 2 usage, I/O or schema error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import identities
from .frame import NUMERIC_TOL, SEARCH_TOL, check_informational_completeness, gram, structural_battery, vectorize
from .io import (
    SchemaError,
    attach_coefficients,
    dumps,
    encode_complex,
    family_coefficients,
    family_from_mubs,
    family_from_sic,
    mubs_from_family,
    read_family,
    sic_from_family,
    write_json,
)
from .mub import build_prime_mubs, closed_form_dkq, is_prime, mub_battery, verify_mubs
from .report import Check, Report
from .sic import SearchConfig, search_fiducial, sic_battery, verify_sic
from .tensor import (
    check_coupling,
    check_hermitian_conjugation,
    check_lie_closure,
    check_trace_orthogonality,
    index_pairs,
    unit_tensor_matrix,
)
from .wigner import HalfInt, QuantumNumberError, as_twice, six_j, three_jm

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(payload, out: str | None) -> None:
    if out:
        write_json(out, payload)
    else:
        sys.stdout.write(dumps(payload))


def _report_payload(report: Report, argv, seconds: float) -> dict:
    body = report.to_dict()
    body["command"] = list(argv)
    body["wall_time_seconds"] = round(seconds, 3)
    return body


def _finish_report(report: Report, args, t0: float) -> int:
    _emit(_report_payload(report, args.argv, time.perf_counter() - t0), args.out)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# wigner


def _quantum_number(text: str) -> HalfInt:
    try:
        return HalfInt(as_twice(text))
    except (QuantumNumberError, TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_wigner(args) -> int:
    if args.symbol == "3jm":
        value = three_jm(*(args.twice[n] for n in ("j1", "j2", "j3", "m1", "m2", "m3")))
    else:
        value = six_j(*(args.twice[n] for n in ("j1", "j2", "j3", "j4", "j5", "j6")))
    print(value)
    sign = "+1" if value.sign > 0 else ("-1" if value.sign < 0 else "0")
    print(f"sign      {sign}")
    print(f"square    {value.square}")
    print(f"decimal   {float(value)!r}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# identities


def _suite_check(res: identities.SuiteResult, tol: float = 0.0) -> Check:
    # exact sweeps report the failure count; float sweeps the worst deviation
    residual = res.residual if not res.exact else (0.0 if res.passed else float(len(res.failures)))
    return Check(
        res.name,
        _SUITE_RELATIONS[res.name],
        res.passed,
        residual,
        tol,
        res.failures[0] if res.failures else None,
        {"checked": res.checked, "exact": res.exact, "seconds": round(res.seconds, 3), "first_failures": res.failures[:10]},
    )


_SUITE_RELATIONS = {
    "orthogonality_mm": "sum_mm' 3jm 3jm = delta delta triangle / (2k+1)",
    "orthogonality_kq": "sum_kq (2k+1) 3jm 3jm = delta delta",
    "barycenter": "sum_m (-1)^(j-m) (j k j; -m q m) = sqrt(2j+1) delta_k0 delta_q0",
    "contraction": "sum over m of three 3jm = 3jm x 6j",
}


def cmd_identities(args) -> int:
    t0 = time.perf_counter()
    n = args.max_two_j
    if n < 0:
        raise UsageError("--max-two-j must be nonnegative")
    flip = None
    if args.inject_sign_flip:
        # a flipped entry is invisible in a 1x1 block, so flip in the j = j' = 1/2 block
        if n < 1:
            raise UsageError("--inject-sign-flip needs --max-two-j >= 1")
        flip = (1, 1, 0)
    if args.mode == "float":
        tol = 1e-12 if args.tol is None else args.tol
        suites = identities.float_identity_suite(n, tol, _flip=flip)
    else:
        tol = 0.0
        suites = [
            identities.orthogonality_mm_suite(n, _flip=flip),
            identities.orthogonality_kq_suite(n),
            identities.barycenter_suite(n),
            identities.contraction_suite(n),
        ]
    report = Report(f"{args.mode} identity suite (two_j <= {n})", [_suite_check(s, tol) for s in suites])
    for tj in range(n + 1):
        for check in (
            check_hermitian_conjugation(tj),
            check_trace_orthogonality(tj),
            check_coupling(tj),
            check_lie_closure(tj),
        ):
            check.name = f"{check.name}[two_j={tj}]"
            report.checks.append(check)
    return _finish_report(report, args, t0)


# ---------------------------------------------------------------------------
# tensor


def cmd_tensor_dump(args) -> int:
    tj = args.two_j
    if tj < 0:
        raise UsageError("--two-j must be nonnegative")
    pairs = index_pairs(tj)
    if args.k is not None:
        pairs = [(k, q) for k, q in pairs if k == args.k and (args.q is None or q == args.q)]
        if not pairs:
            raise UsageError(f"no unit tensor with k={args.k}, q={args.q} at two_j={tj}")
    tensors = [
        {"k": k, "q": q, "i": k * k + k + q + 1, "matrix": encode_complex(unit_tensor_matrix(tj, k, q))}
        for k, q in pairs
    ]
    _emit({"schema_version": 1, "two_j": tj, "row_order": "m = j, j-1, ..., -j", "tensors": tensors}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# families


def _mub_report(family, tol) -> Report:
    mubs = mubs_from_family(family)
    verify_tol = 1e-12 if tol is None else tol
    battery_tol = NUMERIC_TOL if tol is None else tol
    report = verify_mubs(mubs, verify_tol)
    report.title = f"MUB verification and structural battery (d={mubs.d})"
    report.extend(mub_battery(mubs, battery_tol).checks)
    report.checks.append(check_informational_completeness(family_coefficients(family)))
    return report


def _sic_report(family, tol) -> Report:
    cand = sic_from_family(family)
    tol = SEARCH_TOL if tol is None else tol
    report = verify_sic(cand, tol)
    report.title = f"SIC verification and structural battery (d={cand.d})"
    report.extend(sic_battery(cand, tol).checks)
    return report


def _generic_report(family, tol) -> Report:
    tol = NUMERIC_TOL if tol is None else tol
    coeffs = family_coefficients(family)
    report = structural_battery(coeffs, np.eye(len(coeffs)), 1.0, tol, f"generic family checks (d={family.d})")
    # no Gram target or sum-rule weight is known for an arbitrary family
    report.checks = [c for c in report.checks if c.name not in ("rotational_invariance", "sum_rule")]
    report.checks.append(check_informational_completeness(coeffs))
    return report


def _gram_details(family) -> dict:
    spectrum = gram([vectorize(c) for c in family_coefficients(family)]).eigen_spectrum
    return {"gram_spectrum": np.sort(np.asarray(spectrum).real)[::-1]}


def _verify(args, expected_kind: str | None) -> int:
    t0 = time.perf_counter()
    family = read_family(args.file)
    if expected_kind is not None and family.kind != expected_kind:
        print(f"note: {args.file} holds a {family.kind} family; checking it as such", file=sys.stderr)
    build = {"mub": _mub_report, "sic": _sic_report, "generic": _generic_report}[family.kind]
    report = build(family, args.tol)
    body = _report_payload(report, args.argv, time.perf_counter() - t0)
    body.update(_gram_details(family))
    _emit(body, args.out)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_mub_build(args) -> int:
    if not is_prime(args.d):
        raise UsageError(f"d must be prime for the explicit MUB construction, got {args.d}")
    _emit(family_from_mubs(build_prime_mubs(args.d)), args.out)
    return EXIT_OK


def _coeffs(args) -> int:
    family = attach_coefficients(read_family(args.file))
    if family.kind == "mub" and is_prime(family.d) and len(family.members) == family.d * (family.d + 1):
        d = family.d
        worst = 0.0
        for m in family.members:
            a, alpha = m.label
            for i, (k, q) in enumerate(index_pairs(family.two_j)):
                worst = max(worst, abs(m.coefficients[i] - closed_form_dkq(d, a, alpha, k, q)))
        family.metadata["closed_form_max_deviation"] = worst
    _emit(family, args.out)
    return EXIT_OK


def cmd_sic_search(args) -> int:
    covariant = not args.free
    config = SearchConfig(args.d, args.restarts, args.max_iterations, args.tol, args.seed, covariant)
    cand = search_fiducial(config)
    _emit(family_from_sic(cand), args.out)
    state = "converged" if cand.converged else "NOT converged"
    print(f"d={cand.d}: {state}, residual {cand.residual:.3e} (restart {cand.provenance['restart']})", file=sys.stderr)
    return EXIT_OK if cand.converged else EXIT_FAIL


def cmd_frame_check(args) -> int:
    t0 = time.perf_counter()
    family = read_family(args.file)
    coeffs = family_coefficients(family)
    if family.kind == "sic":
        report = sic_battery(sic_from_family(family), SEARCH_TOL if args.tol is None else args.tol)
    elif family.kind == "mub":
        report = mub_battery(mubs_from_family(family), NUMERIC_TOL if args.tol is None else args.tol)
    else:
        report = _generic_report(family, args.tol)
    if family.kind != "generic":
        report.checks.append(check_informational_completeness(coeffs))
    body = _report_payload(report, args.argv, time.perf_counter() - t0)
    body.update(_gram_details(family))
    _emit(body, args.out)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def _add_out(p):
    p.add_argument("--out", help="write JSON here (atomically) instead of stdout")


def _add_verify(p, help_text):
    p.add_argument("file", help=help_text)
    p.add_argument("--tol", type=float, default=None, help="override the default tolerance")
    _add_out(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="racah-frames", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wigner", help="exact 3-jm and 6-j symbols")
    wsub = w.add_subparsers(dest="symbol", required=True)
    for symbol, names in (("3jm", ("j1", "j2", "j3", "m1", "m2", "m3")), ("6j", ("j1", "j2", "j3", "j4", "j5", "j6"))):
        p = wsub.add_parser(symbol, help=f"{symbol} symbol; values like 1, -3/2")
        for n in names:
            p.add_argument(f"--{n}", type=_quantum_number, required=True, metavar="X")
        p.set_defaults(func=cmd_wigner, names=names)

    p = sub.add_parser("identities", help="exact identity sweeps and unit-tensor checks")
    p.add_argument("--max-two-j", type=int, default=8)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--tol", type=float, help="float mode tolerance (default 1e-12)")
    p.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    _add_out(p)
    p.set_defaults(func=cmd_identities)

    t = sub.add_parser("tensor", help="unit tensor matrices")
    tsub = t.add_subparsers(dest="action", required=True)
    p = tsub.add_parser("dump", help="dump unit tensors as JSON")
    p.add_argument("--two-j", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int)
    _add_out(p)
    p.set_defaults(func=cmd_tensor_dump)

    m = sub.add_parser("mub", help="mutually unbiased bases in prime dimension")
    msub = m.add_subparsers(dest="action", required=True)
    p = msub.add_parser("build")
    p.add_argument("-d", type=int, required=True)
    _add_out(p)
    p.set_defaults(func=cmd_mub_build)
    p = msub.add_parser("verify")
    _add_verify(p, "family JSON file")
    p.set_defaults(func=lambda a: _verify(a, "mub"))
    p = msub.add_parser("coeffs")
    p.add_argument("file")
    _add_out(p)
    p.set_defaults(func=_coeffs)

    s = sub.add_parser("sic", help="SIC-POVM search and verification")
    ssub = s.add_subparsers(dest="action", required=True)
    p = ssub.add_parser("search")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--max-iterations", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=42)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--covariant", action="store_true", default=True, help="Weyl-Heisenberg orbit of one fiducial (default)")
    mode.add_argument("--free", action="store_true", help="optimize all d^2 states independently")
    _add_out(p)
    p.set_defaults(func=cmd_sic_search)
    p = ssub.add_parser("verify")
    _add_verify(p, "family JSON file")
    p.set_defaults(func=lambda a: _verify(a, "sic"))
    p = ssub.add_parser("coeffs")
    p.add_argument("file")
    _add_out(p)
    p.set_defaults(func=_coeffs)

    f = sub.add_parser("frame", help="structural frame checks")
    fsub = f.add_subparsers(dest="action", required=True)
    p = fsub.add_parser("check")
    _add_verify(p, "family JSON file")
    p.set_defaults(func=cmd_frame_check)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    args.argv = argv
    if getattr(args, "names", None):
        args.twice = {n: getattr(args, n) for n in args.names}
    try:
        return args.func(args)
    except (UsageError, QuantumNumberError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 valid / ok, 1 invalid / failed check, 2 usage or input error,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys

from . import algebra as alg
from . import power as pw
from .canon import Step, export_dot, full_normalize
from .hnf import hnf_normalize, step_hnf
from .logics import LogicFileError, decide, matrix_countermodel, resolve_logic, translate
from .semantics import equiv
from .term import ParseError, parse, to_str

OK, INVALID, USAGE, INTERNAL = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nbalogic", description="Decision procedures for n-valued logics via q-terms.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("normalize", help="print the hnf or full normal form of a q-term")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--stage", choices=("hnf", "full"), default="full")
    s.add_argument("--trace", action="store_true", help="also print every rewrite step")
    s.add_argument("formula")

    for name, text in (("check", "decide validity by translation and rewriting"),
                       ("oracle", "decide validity by brute force in the logic's matrix")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--logic", required=True, help="logic file or builtin:NAME:N")
        s.add_argument("--premise", "-p", action="append", default=[], help="premise (repeatable)")
        s.add_argument("formula")

    s = sub.add_parser("translate", help="print the translation of a formula into q-terms")
    s.add_argument("--logic", required=True)
    s.add_argument("formula")

    s = sub.add_parser("equiv", help="brute-force equivalence of two q-terms")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("f1")
    s.add_argument("f2")

    s = sub.add_parser("mdd", help="DOT export of the canonical form")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("-o", "--output")
    s.add_argument("formula")

    s = sub.add_parser("algebra", help="finite algebra checks")
    asub = s.add_subparsers(dest="action", required=True)
    v = asub.add_parser("verify", help="axioms, centrality and representation")
    v.add_argument("file")

    s = sub.add_parser("power", help="semiring power checks")
    psub = s.add_subparsers(dest="action", required=True)
    v = psub.add_parser("verify", help="centrality, complemented core and Boolean powers")
    v.add_argument("--semiring", required=True)
    v.add_argument("--e-size", type=int, required=True)
    return p


def _normalize(args, out) -> int:
    t = parse(args.formula, args.n)
    if args.stage == "hnf":
        steps = []
        u = t
        while True:
            nxt = step_hnf(u)
            if nxt is None:
                break
            steps.append(nxt)
            u = nxt
        print(to_str(hnf_normalize(t)), file=out)
        if args.trace:
            for s in steps:
                print(f"  -> {to_str(s)}", file=out)
        return OK
    h = hnf_normalize(t)
    trace: list[Step] = [] if args.trace else None
    nf = full_normalize(h, args.n, trace)
    print(to_str(nf.term), file=out)
    if args.trace:
        if h is not t:
            print(f"  hnf {to_str(h)}", file=out)
        for s in trace:
            print(f"  {s.rule} {to_str(s.redex)} -> {to_str(s.contractum)}", file=out)
    return OK


def _check(args, out) -> int:
    L = resolve_logic(args.logic)
    phi = L.parse(args.formula)
    premises = [L.parse(p) for p in args.premise]
    if args.command == "check":
        ok = decide(L, premises, phi)
    else:
        cm = matrix_countermodel(L, premises, phi)
        ok = cm is None
        if cm is not None:
            shown = ", ".join(f"x{k}=e{v}" for k, v in sorted(cm.items()))
            print(f"countermodel: {shown}", file=sys.stderr)
    print("valid" if ok else "invalid", file=out)
    return OK if ok else INVALID


def _algebra_verify(args, out) -> int:
    A = alg.load_algebra(args.file)
    print(f"algebra {A.name}: n={A.n}, |A|={A.size}, ops={','.join(A.ops) or '-'}", file=out)
    failed = False
    for law in alg.axiom_laws(A.n):
        try:
            f = alg.check_law(A, law)
        except alg.CheckTooLarge as exc:
            print(f"{law.name} skipped ({exc})", file=out)
            continue
        print(f"{law.name} ok" if f is None else str(f), file=out)
        failed |= f is not None
    central = 0
    for c in A.universe:
        f = alg.central_failure(A, c)
        if f is None:
            central += 1
        else:
            print(f"not central {A.label(c)}: {f}", file=out)
    print(f"central elements {central}/{A.size}", file=out)
    if central < A.size or failed:
        print("not an nBA", file=out)
        return INVALID
    print("nBA", file=out)
    if A.size == A.n:
        bad = alg.simplicity_failures(A)
        print(f"simplicity {'ok' if not bad else bad}", file=out)
        failed |= bool(bad)
    r = alg.representation_iso(A, check_nba=False)
    print(f"representation ok: |B_A|={r.boolean_size}, central vectors={r.central_vectors}", file=out)
    return INVALID if failed else OK


def _power_verify(args, out) -> int:
    R = pw.load_semiring(args.semiring)
    E = alg.generating_algebra(args.e_size)
    print(f"semiring {R.name}: |R|={R.size}, axioms ok", file=out)
    C = pw.complemented_core(R)
    print(f"C(R) = {{{', '.join(R.label(r) for r in C.members)}}}", file=out)
    rows = pw.cross_validate_centrality(R, E)
    agree = sum(r.agree for r in rows)
    print(f"centrality cross-check {agree}/{len(rows)} agree", file=out)
    core = pw.compare_core_power(E, R)
    print(f"E[R] = E[C(R)] {'ok' if core.ok else 'FAILED'} (|E[R]|={core.size})", file=out)
    CR = pw.semiring_from_boolean_algebra(C)
    bp = pw.boolean_power(E, CR)
    expected = E.size ** len(bp.atoms)
    size_ok = bp.semiring_power.size == expected
    print(f"|E[C(R)]| = {bp.semiring_power.size} = {E.size}^{len(bp.atoms)} {'ok' if size_ok else 'FAILED'}", file=out)
    return OK if agree == len(rows) and core.ok and size_ok else INVALID


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        if args.command == "normalize":
            return _normalize(args, out)
        if args.command in ("check", "oracle"):
            return _check(args, out)
        if args.command == "translate":
            L = resolve_logic(args.logic)
            print(to_str(translate(L.parse(args.formula), L)), file=out)
            return OK
        if args.command == "equiv":
            same = equiv(parse(args.f1, args.n), parse(args.f2, args.n), args.n)
            print("equivalent" if same else "not equivalent", file=out)
            return OK if same else INVALID
        if args.command == "mdd":
            nf = full_normalize(hnf_normalize(parse(args.formula, args.n)), args.n)
            dot = export_dot(nf, args.n)
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(dot)
            else:
                out.write(dot)
            return OK
        if args.command == "algebra":
            return _algebra_verify(args, out)
        return _power_verify(args, out)
    except alg.InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL
    except (ParseError, LogicFileError, alg.AlgebraError, pw.SemiringError, alg.CheckTooLarge,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

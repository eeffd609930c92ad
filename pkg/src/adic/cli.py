"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys

from .coeffs import QQ
from .decay import DecayError, DecayStream, decay_check, hom_apply, scanned_bound, series_sum
from .formats import FormatError, load, parse_elements, parse_module, parse_system, parse_vector, vector_text
from .gallery import GALLERY_ITEMS, CapTooSmall, run_all
from .ideals import DegreeCapError, DyadicDistance, dist_ring, normal_form, ord_ring, parse_ideal
from .lift import NotAdicSystem, NotFlat, NotGenerating, basis_lift, nakayama_lift
from .parsing import ParseError, parse_polynomial, parse_stream
from .polyring import Polynomial, vec_str, vec_sub
from .tower import (
    CoherenceError,
    dist_adic_bounds,
    dist_prime,
    ord_adic_bounds,
    ord_prime,
    ring_module,
    theorem6_check,
    tower_from_element,
)
from .truncate import ModulePresentation, UnsupportedError, ord_module, truncate


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ideal", default="vars *", help="'vars t1 t2', 'vars *' or 'gens <poly>; ...'")
    common.add_argument("--cap", type=int, default=8, help="truncation cap (default 8)")
    common.add_argument("--module", help="module presentation file (adic system file for basis-lift)")
    common.add_argument("--gens", help="file with one element per line")
    common.add_argument("--stream", help="stream '<k>: <sexpr>' or a built-in such as @bseries")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="adic", description="Exact computations in adic completions.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    s = add("ord", "adic order of an element (or of a stream sum)")
    s.add_argument("expr", nargs="?")
    s = add("dist", "adic distance between two elements (or a stream sum and an element)")
    s.add_argument("exprs", nargs="*")
    s = add("nf", "normal form at a truncation level")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("expr")
    add("sum", "sum of a decaying stream, printed at levels 0..cap")
    add("hom", "apply the homomorphism g -> sum g(z) m_z for a stream g and family --gens")
    s = add("nakayama", "write an element in terms of a family generating M_0")
    s.add_argument("expr")
    add("basis-lift", "lift a basis through an adic system (--module names the system file)")
    s = add("check", "run a checker")
    s.add_argument("what", choices=["thm6"])
    s = add("gallery", "verify the example gallery")
    s.add_argument("--only", choices=GALLERY_ITEMS)
    s = add("parse", "parse and print in canonical form")
    s.add_argument("expr", nargs="?")
    return p


# ---------------------------------------------------------------- helpers


def _cap(args) -> int:
    if args.cap < 0:
        raise UsageError("--cap must be >= 0")
    return args.cap


def _module(args) -> ModulePresentation | None:
    if not args.module:
        return None
    return parse_module(load(args.module))


def _ring(args) -> ModulePresentation:
    return ring_module(parse_ideal(args.ideal, QQ))


def _element(text: str, M: ModulePresentation):
    if M.rank == 1 and "," not in text:
        return (parse_polynomial(text, M.field),)
    return parse_vector(text, M.field, M.rank)


def _horizon(cap: int) -> int:
    return 4 * (cap + 1) + 8


def _ring_stream(args, M: ModulePresentation) -> DecayStream:
    expr = parse_stream(args.stream)
    if expr.delta_valued:
        raise UsageError("this command needs a ring-valued stream (no delta)")

    def term(k: int):
        return (expr.evaluate(k, M.field),)

    bound = scanned_bound(term, M, _horizon(_cap(args)))
    return DecayStream(M, term, bound, expr.source)


def _delta_levels(args, M: ModulePresentation) -> list[dict[int, Polynomial]]:
    """Level images of the sum of a delta-valued stream k -> sum_z c_kz delta_z."""
    expr = parse_stream(args.stream)
    cap = _cap(args)
    horizon = _horizon(cap)
    terms = [expr.evaluate(k, M.field) for k in range(horizon + cap + 1)]
    out = []
    for i in range(cap + 1):
        def nf(p):
            return normal_form(p, M.ideal, i)

        live = [k for k in range(horizon) if any(not nf(p).is_zero() for p in terms[k].values())]
        bound = max(live, default=-1) + 1
        late = [k for k in range(bound, bound + cap + 1)
                if any(not nf(p).is_zero() for p in terms[k].values())]
        if late:
            raise VerificationFailure(f"stream is not decaying: threshold {i} witnesses {late}")
        level: dict[int, Polynomial] = {}
        for k in range(bound):
            for z, p in terms[k].items():
                level[z] = level.get(z, Polynomial.zero(M.field)) + nf(p)
        out.append({z: p for z, p in sorted(level.items()) if not p.is_zero()})
    return out


def _finfn_text(d: dict[int, Polynomial]) -> str:
    if not d:
        return "0"
    return " + ".join(f"({p})*delta({z})" for z, p in d.items())


def _print_tower(x, cap: int, out):
    for i in range(cap + 1):
        out.write(f"level {i}: {vec_str(x.level(i))}\n")


# ---------------------------------------------------------------- commands


def cmd_ord(args, out):
    cap = _cap(args)
    M = _module(args)
    if args.stream:
        R = M or _ring(args)
        x = series_sum(_ring_stream(args, R), cap)
        lo, hi = ord_adic_bounds(x, cap)
        out.write(f"ord' {ord_prime(x, cap)}\n")
        out.write(f"ord {lo}\n" if lo == hi else f"ord in [{lo}, {hi}]\n")
        return
    if args.expr is None:
        raise UsageError("ord needs an expression or --stream")
    if M is None:
        out.write(f"{ord_ring(parse_polynomial(args.expr), parse_ideal(args.ideal), cap)}\n")
    else:
        out.write(f"{ord_module(_element(args.expr, M), M, cap)}\n")


def cmd_dist(args, out):
    cap = _cap(args)
    M = _module(args)
    if args.stream:
        R = M or _ring(args)
        x = series_sum(_ring_stream(args, R), cap)
        other = _element(args.exprs[0], R) if args.exprs else R.zero()
        y = tower_from_element(other, R)
        lo, hi = dist_adic_bounds(x, y, cap)
        out.write(f"dist' {dist_prime(x, y, cap)}\n")
        out.write(f"dist {lo}\n" if str(lo) == str(hi) else f"dist in [{lo}, {hi}]\n")
        return
    if len(args.exprs) != 2:
        raise UsageError("dist needs two expressions (or --stream and at most one)")
    if M is None:
        a = parse_ideal(args.ideal)
        out.write(f"{dist_ring(parse_polynomial(args.exprs[0]), parse_polynomial(args.exprs[1]), a, cap)}\n")
    else:
        u, v = (_element(e, M) for e in args.exprs)
        out.write(f"{DyadicDistance.from_order(ord_module(vec_sub(u, v), M, cap))}\n")


def cmd_nf(args, out):
    if args.level < 0:
        raise UsageError("--level must be >= 0")
    M = _module(args)
    if M is None:
        out.write(f"{normal_form(parse_polynomial(args.expr), parse_ideal(args.ideal), args.level)}\n")
        return
    v = truncate(_element(args.expr, M), M, args.level).coords
    q = M.quotient(args.level, frozenset(i for p in v for i in p.variables()))
    out.write(f"{vector_text(q.from_sparse(q.residue(v)))}\n")


def cmd_sum(args, out):
    if not args.stream:
        raise UsageError("sum needs --stream")
    cap = _cap(args)
    M = _module(args) or _ring(args)
    if parse_stream(args.stream).delta_valued:
        for i, d in enumerate(_delta_levels(args, M)):
            out.write(f"level {i}: {_finfn_text(d)}\n")
        return
    _print_tower(series_sum(_ring_stream(args, M), cap), cap, out)


def cmd_hom(args, out):
    if not (args.stream and args.gens):
        raise UsageError("hom needs --stream (coefficients) and --gens (family)")
    cap = _cap(args)
    M = _module(args) or _ring(args)
    family = parse_elements(load(args.gens), M)
    g = _ring_stream(args, ring_module(M.ideal, M.field))
    x = hom_apply(g, lambda z: family[z] if z < len(family) else M.zero(), cap, module=M)
    _print_tower(x, cap, out)


def cmd_nakayama(args, out):
    if not args.gens:
        raise UsageError("nakayama needs --gens")
    cap = _cap(args)
    M = _module(args) or _ring(args)
    family = parse_elements(load(args.gens), M)
    m = tower_from_element(_element(args.expr, M), M)
    res = nakayama_lift(m, family, cap)
    for z in range(len(family)):
        out.write(f"g({z}) = {res.coefficients.at_level(z, cap)[0]}  (mod a^{cap + 1})\n")
    ok = res.report.success
    out.write(f"residuals zero at levels 0..{cap}: {'yes' if ok else 'no'}\n")
    if not ok:
        raise VerificationFailure("nonzero residual")


def cmd_basis_lift(args, out, err):
    if not args.module:
        raise UsageError("basis-lift needs --module <system file>")
    system = parse_system(load(args.module))
    cap = _cap(args)
    if cap > system.max_level:
        err.write(f"note: system defined through level {system.max_level}; using cap {system.max_level}\n")
        cap = system.max_level
    bl = basis_lift(system, cap)
    for z, tower in enumerate(bl.basis):
        for i, v in enumerate(tower):
            out.write(f"basis {z} level {i}: {vec_str(v)}\n")
    for note in bl.report.notes:
        out.write(note + "\n")
    out.write(f"A_i (x) M -> M_i bijective at levels 0..{cap}: {'yes' if bl.report.success else 'no'}\n")
    if not bl.report.success:
        raise VerificationFailure("basis check failed")


def cmd_check(args, out):
    M = _module(args)
    if M is None:
        raise UsageError("check thm6 needs --module")
    failed = False
    for i in range(_cap(args) + 1):
        r = theorem6_check(M, i)
        out.write(f"{r}\n")
        failed |= not r.passed
    if failed:
        raise VerificationFailure("theorem 6 check failed")


def cmd_gallery(args, out):
    report = run_all(_cap(args), args.seed, args.only)
    out.write(str(report) + "\n")
    if not report.passed:
        raise VerificationFailure("gallery failed")


def cmd_parse(args, out):
    if args.stream:
        expr = parse_stream(args.stream)
        for k in range(expr.start, expr.start + 5):
            v = expr.evaluate(k)
            text = _finfn_text(v) if isinstance(v, dict) else str(v)
            out.write(f"{expr.index_var}={k}: {text}\n")
        return
    if args.expr is None:
        raise UsageError("parse needs an expression or --stream")
    out.write(f"{parse_polynomial(args.expr)}\n")


COMMANDS = {
    "ord": cmd_ord, "dist": cmd_dist, "nf": cmd_nf, "sum": cmd_sum, "hom": cmd_hom,
    "nakayama": cmd_nakayama, "check": cmd_check, "gallery": cmd_gallery, "parse": cmd_parse,
}


def run(argv: list[str]) -> tuple[int, str, str]:
    """Run one invocation; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    parser = _parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), out.getvalue(), err.getvalue()
    try:
        if args.command == "basis-lift":
            cmd_basis_lift(args, out, err)
        else:
            COMMANDS[args.command](args, out)
    except (ParseError, FormatError, UsageError, UnsupportedError, DegreeCapError, CapTooSmall, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 2, out.getvalue(), err.getvalue()
    except (VerificationFailure, NotGenerating, NotFlat, NotAdicSystem, DecayError, CoherenceError) as exc:
        err.write(f"verification failed: {exc}\n")
        return 1, out.getvalue(), err.getvalue()
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return 2, out.getvalue(), err.getvalue()
    return 0, out.getvalue(), err.getvalue()


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
